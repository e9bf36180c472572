#include <gtest/gtest.h>

#include <chebshock/pipeline.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "oracles.hpp"

using namespace chebshock;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("chebshock_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) { return int(std::count(s.begin(), s.end(), '\n')); }

// default run truncated early; shared across tests
const pipeline_result& short_pipeline() {
  static const pipeline_result r = [] {
    simulation_config c;
    c.solver.t_end = 0.6;
    return run_pipeline(c);
  }();
  return r;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(CHEBSHOCK_CLI) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Config, EmptyGivesDefaults) {
  auto c = parse_config("");
  EXPECT_EQ(c.solver.order, 60);
  EXPECT_EQ(c.solver.s, 2);
  EXPECT_EQ(c.solver.c, 0.01);
  EXPECT_EQ(c.solver.sigma, 0.15);
  EXPECT_EQ(c.solver.t_end, 3.0);
  EXPECT_EQ(c.outdir, "out");
}

TEST(Config, CommentsAndWhitespace) {
  auto c = parse_config("# header\n  order = 40   # trailing\n\nsigma=0.2\n");
  EXPECT_EQ(c.solver.order, 40);
  EXPECT_EQ(c.solver.sigma, 0.2);
}

TEST(Config, Errors) {
  auto names = [](const std::string& text, const std::string& key) {
    try {
      parse_config(text);
    } catch (const config_error& e) {
      return std::string(e.what()).rfind(key, 0) == 0;
    }
    return false;
  };
  EXPECT_TRUE(names("order = 0", "order"));
  EXPECT_TRUE(names("ordr = 60", "ordr"));
  EXPECT_TRUE(names("cfl = fast", "cfl"));
  EXPECT_TRUE(names("factor_families = trig,bogus", "factor_families"));
  EXPECT_TRUE(names("one_sided_theta = 2", "one_sided_theta"));
  EXPECT_THROW(parse_config("order 60"), config_error);
  EXPECT_THROW(load_config("/nonexistent/chebshock.cfg"), config_error);
}

TEST(Config, SlopeThresholdPassThrough) {
  auto c = parse_config("slope_threshold = -0.02\n");
  EXPECT_EQ(c.detection.slope_threshold, -0.02);
  vec a(61, 0.0);
  a[0] = 1;
  auto rep = detect_edges(a, 1.0, c.detection);
  EXPECT_EQ(rep.thresholds.slope_threshold, -0.02);
}

TEST(Config, RoundTrip) {
  auto c = parse_config("order = 48\nc = 0.0123456789012345\nfactor_families = trig,exp\noutdir = somewhere\n");
  auto text = write_config(c);
  auto d = parse_config(text);
  EXPECT_EQ(write_config(d), text);
  EXPECT_EQ(d.solver.c, 0.0123456789012345);
  EXPECT_EQ(d.detection.families.size(), 2u);
  EXPECT_EQ(d.outdir, "somewhere");
}

TEST(Config, FileLoad) {
  auto dir = scratch("cfg");
  std::ofstream(dir / "a.cfg") << "order = 32\n";
  EXPECT_EQ(load_config(dir / "a.cfg").solver.order, 32);
  fs::remove_all(dir);
}

TEST(Outputs, NoSnapshots) {
  auto dir = scratch("empty");
  auto man = write_outputs({}, dir, simulation_config{});
  auto j = nlohmann::json::parse(slurp(man));
  EXPECT_TRUE(j["snapshots"].empty());
  EXPECT_EQ(j["config"]["order"], "60");
  int csv = 0;
  for (auto& e : fs::directory_iterator(dir)) csv += e.path().extension() == ".csv";
  EXPECT_EQ(csv, 0);
  fs::remove_all(dir);
}

TEST(Outputs, SingleSmoothSnapshot) {
  simulation_config cfg;
  auto g = build_grid(60);
  solver_state st{0.0, gaussian_ic(g, 0.0, 0.15), 0};
  auto ps = postprocess_snapshot(st, cfg);
  ASSERT_EQ(ps.report.label, edge_label::smooth);
  EXPECT_EQ(ps.applied, treatment::none);
  EXPECT_FALSE(ps.mollified_nodal);

  auto dir = scratch("one");
  auto man = nlohmann::json::parse(slurp(write_outputs({ps}, dir, cfg)));
  EXPECT_EQ(man["snapshots"][0]["edge_report"]["label"], "Smooth");
  EXPECT_EQ(man["snapshots"][0]["treatment"], "None");
  std::stringstream csv(slurp(dir / "snap_0.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "x,u_raw,u_mollified");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_EQ(line.back(), ',');
  }
  EXPECT_EQ(rows, 61);
  fs::remove_all(dir);
}

TEST(Outputs, FullPrecision) {
  processed_snapshot s;
  s.nodes = {0.1};
  s.raw_nodal = {1.0 / 3};
  s.mollified_nodal = vec{2.0 / 3};
  std::stringstream csv(snapshot_csv(s));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  double x, u, m;
  char c1, c2;
  std::stringstream(line) >> x >> c1 >> u >> c2 >> m;
  EXPECT_EQ(u, 1.0 / 3);
  EXPECT_EQ(m, 2.0 / 3);
}

TEST(Outputs, UnwritableDirectory) {
  auto dir = scratch("ro");
  std::ofstream(dir / "blocker") << "x";
  EXPECT_ANY_THROW(write_outputs({}, dir / "blocker" / "sub", simulation_config{}));
  fs::remove_all(dir);
}

TEST(Pipeline, SnapshotInvariants) {
  const auto& r = short_pipeline();
  ASSERT_FALSE(r.run.aborted);
  ASSERT_EQ(r.snapshots.size(), 16u);
  for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
    const auto& s = r.snapshots[i];
    EXPECT_EQ(s.time, r.run.snapshots[i].time);
    bool smooth = s.report.label == edge_label::smooth;
    EXPECT_EQ(s.applied == treatment::none, smooth);
    EXPECT_EQ(!s.mollified_nodal, smooth);
    if (s.report.label == edge_label::resolution_limited) EXPECT_EQ(s.applied, treatment::two_sided);
    if (s.report.label == edge_label::discontinuous) {
      EXPECT_EQ(s.applied, treatment::one_sided);
      EXPECT_FALSE(s.report.edges.empty());
    }
    EXPECT_TRUE(s.error.empty()) << s.error;
  }
  EXPECT_EQ(r.snapshots.front().report.label, edge_label::smooth);
}

TEST(Pipeline, ManifestMatchesFiles) {
  const auto& r = short_pipeline();
  auto dir = scratch("man");
  simulation_config cfg;
  auto man = nlohmann::json::parse(slurp(write_outputs(r.snapshots, dir, cfg)));
  ASSERT_EQ(man["snapshots"].size(), r.snapshots.size());
  for (auto& e : man["snapshots"]) {
    ASSERT_TRUE(fs::exists(dir / e["file"].get<std::string>()));
    ASSERT_TRUE(fs::exists(dir / e["minmod_file"].get<std::string>()));
    EXPECT_EQ(count_lines(slurp(dir / e["file"].get<std::string>())) - 1, 61);
    EXPECT_EQ(e["rows"], 61);
  }
  EXPECT_EQ(man["config"], config_json(cfg));
  fs::remove_all(dir);
}

TEST(Pipeline, Deterministic) {
  simulation_config c;
  c.solver.t_end = 0.2;
  auto a = run_pipeline(c), b = run_pipeline(c);
  auto da = scratch("det_a"), db = scratch("det_b");
  write_outputs(a.snapshots, da, c);
  write_outputs(b.snapshots, db, c);
  for (auto& e : fs::directory_iterator(da)) EXPECT_EQ(slurp(e.path()), slurp(db / e.path().filename())) << e.path();
  fs::remove_all(da);
  fs::remove_all(db);
}

TEST(Pipeline, SteepGradientTwoSidedSuppressesOscillation) {
  // first resolution-limited snapshot of the default run
  const auto& r = short_pipeline();
  const processed_snapshot* s = nullptr;
  for (std::size_t i = 0; i < r.snapshots.size() && !s; ++i)
    if (r.snapshots[i].report.label == edge_label::resolution_limited) s = &r.snapshots[i];
  ASSERT_NE(s, nullptr);
  mollifier_settings ms;
  auto spec = spec_for(s->report, 60, ms);
  auto xs = oracle::uniform(-0.95, 0.95, 761);
  auto m = mollify_at(s->modal, spec, xs);
  vec raw(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) raw[i] = clenshaw(s->modal, xs[i]);
  double dr = oracle::unimodal_deviation(raw), dm = oracle::unimodal_deviation(m);
  EXPECT_GE(dr / dm, 5.0) << "t=" << s->time << " raw " << dr << " mollified " << dm;
}

TEST(Cli, ExitCodes) {
  auto dir = scratch("cli");
  EXPECT_EQ(run_cli("--quiet --outdir " + (dir / "demo").string() + " demo-tophat"), 0);
  EXPECT_TRUE(fs::exists(dir / "demo" / "manifest.json"));

  std::ofstream(dir / "bad.cfg") << "order = 0\n";
  EXPECT_EQ(run_cli("--quiet --config " + (dir / "bad.cfg").string() + " run"), 1);
  EXPECT_EQ(run_cli("--quiet --config " + (dir / "missing.cfg").string() + " run"), 1);

  std::ofstream(dir / "blow.cfg") << "c = 1e7\nt_end = 0.05\n";
  EXPECT_EQ(run_cli("--quiet --outdir " + (dir / "blow").string() + " --config " + (dir / "blow.cfg").string() + " run"), 2);

  std::ofstream(dir / "short.cfg") << "t_end = 0.08\n";
  EXPECT_EQ(run_cli("--quiet --outdir " + (dir / "run").string() + " --config " + (dir / "short.cfg").string() + " run"), 0);
  auto man = nlohmann::json::parse(slurp(dir / "run" / "manifest.json"));
  EXPECT_EQ(man["snapshots"].size(), 3u);
  fs::remove_all(dir);
}

TEST(Cli, DetectReadsNodalCsv) {
  auto dir = scratch("detect");
  auto g = build_grid(60);
  {
    std::ofstream f(dir / "tophat.csv");
    f << "u\n";
    for (double x : g.nodes) f << fmt_double(oracle::tophat(x)) << "\n";
  }
  auto out = dir / "report.json";
  std::string cmd = std::string(CHEBSHOCK_CLI) + " --quiet detect " + (dir / "tophat.csv").string() + " > " + out.string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j["label"], "Discontinuous");
  EXPECT_EQ(j["edges"].size(), 2u);
  fs::remove_all(dir);
}
