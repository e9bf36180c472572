#include <CLI11.hpp>

#include <chebshock/chebshock.hpp>

#include <fstream>
#include <iostream>

using namespace chebshock;
namespace fs = std::filesystem;

namespace {

struct options {
  std::string config;
  std::string outdir;
  bool quiet = false;
  std::string detect_input;
};

simulation_config resolve(const options& o) {
  auto cfg = o.config.empty() ? parse_config("") : load_config(o.config);
  if (!o.outdir.empty()) cfg.outdir = o.outdir;
  return cfg;
}

// one value per line; the last comma-separated column is taken, a
// non-numeric first line is treated as a header
vec read_nodal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read " + path);
  vec u;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty()) continue;
    auto comma = line.rfind(',');
    std::string cell = detail::trim(comma == std::string::npos ? line : line.substr(comma + 1));
    double v = 0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
      if (u.empty() && lineno == 1) continue;
      throw config_error(path + ":" + std::to_string(lineno) + ": not a number");
    }
    u.push_back(v);
  }
  if (u.size() < 9) throw config_error(path + ": need at least 9 nodal values (order >= 8)");
  return u;
}

void print_summary(const std::vector<processed_snapshot>& snaps) {
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const auto& s = snaps[i];
    std::cerr << "t=" << s.time << "  " << to_string(s.report.label) << "  edges=" << s.report.edges.size();
    for (auto& e : s.report.edges) std::cerr << " " << e.location;
    if (!s.error.empty()) std::cerr << "  error: " << s.error;
    std::cerr << "\n";
  }
}

int cmd_run(const options& o) {
  auto cfg = resolve(o);
  auto r = run_pipeline(cfg);
  auto man = write_outputs(r.snapshots, cfg.outdir, cfg,
                           {{"run", {{"max_abs_u", r.run.max_abs_u},
                                     {"max_modal_ratio", r.run.max_modal_ratio},
                                     {"aborted", r.run.aborted},
                                     {"message", r.run.message}}}});
  if (!o.quiet) {
    print_summary(r.snapshots);
    std::cerr << "max|u| " << r.run.max_abs_u << ", manifest " << man.string() << "\n";
  }
  if (r.run.aborted) {
    std::cerr << "numerical abort: " << r.run.message << "\n";
    return 2;
  }
  return 0;
}

int cmd_detect(const options& o) {
  auto cfg = resolve(o);
  auto f = field_from_nodal(read_nodal_csv(o.detect_input));
  edge_report rep;
  try {
    rep = detect_edges(f.modal, max_abs(f.nodal), cfg.detection);
  } catch (const std::invalid_argument& e) {
    throw config_error(o.detect_input + ": " + e.what());
  }
  std::cout << report_json(rep).dump(2) << "\n";
  return 0;
}

int cmd_demo_tophat(const options& o) {
  auto cfg = resolve(o);
  const int N = cfg.solver.order;
  auto g = build_grid(N);
  vec u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (g.nodes[i] > -0.7 && g.nodes[i] < -0.2) ? 1.0 : 0.0;
  solver_state st{0.0, field_from_nodal(u), 0};
  auto ps = postprocess_snapshot(st, cfg);
  auto man = write_outputs({ps}, cfg.outdir, cfg, {{"demo", "tophat"}});

  // dense samples for plotting the Gibbs overshoot against the mollified curve
  std::string fine = "x,u_exact,u_partial,u_mollified\n";
  const bool moll = ps.report.label != edge_label::smooth;
  auto spec = spec_for(ps.report, N, cfg.mollifier);
  const auto edges = edge_set(spec);
  for (int i = 1; i < 2000; ++i) {
    double x = -1.0 + i / 1000.0;
    fine += fmt_double(x) + "," + fmt_double((x > -0.7 && x < -0.2) ? 1.0 : 0.0) + "," +
            fmt_double(clenshaw(ps.modal, x)) + ",";
    if (moll && distance_to_edge(edges, x) > 1e-12) fine += fmt_double(mollify_at(ps.modal, spec, {x})[0]);
    fine += "\n";
  }
  std::ofstream(fs::path(cfg.outdir) / "tophat_fine.csv") << fine;
  if (!o.quiet) {
    print_summary({ps});
    std::cerr << "manifest " << man.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chebyshev shock detection and mollification"};
  options o;
  app.add_option("--config", o.config, "key = value config file");
  app.add_option("--outdir", o.outdir, "output directory (overrides config)");
  app.add_flag("--quiet", o.quiet, "no progress output");
  auto* run = app.add_subcommand("run", "simulate, classify and mollify every snapshot");
  auto* detect = app.add_subcommand("detect", "edge report for nodal values on a CGL grid");
  detect->add_option("input", o.detect_input, "CSV, one nodal value per line (last column)")->required();
  auto* demo = app.add_subcommand("demo-tophat", "tophat partial sum, detection and one-sided mollification");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(o);
    if (*detect) return cmd_detect(o);
    if (*demo) return cmd_demo_tophat(o);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const numerical_abort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
