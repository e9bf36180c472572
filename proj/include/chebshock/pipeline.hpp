#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "burgers.hpp"
#include "edge_detect.hpp"
#include "mollifier.hpp"

namespace chebshock {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct simulation_config {
  solver_config solver;
  detection_config detection;
  mollifier_settings mollifier;
  std::string outdir = "out";
};

/// Shortest decimal that reads back to the same double.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw config_error(key + ": not a number: '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw config_error(key + ": not an integer: '" + v + "'");
  return out;
}

inline std::vector<factor_family> parse_families(const std::string& key, const std::string& v) {
  std::vector<factor_family> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      out.push_back(parse_family(item));
    } catch (const std::invalid_argument& e) {
      throw config_error(key + ": " + e.what());
    }
  }
  if (out.empty()) throw config_error(key + ": at least one family required");
  return out;
}

inline std::string join_families(const std::vector<factor_family>& f) {
  std::string s;
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + to_string(f[i]);
  return s;
}

}  // namespace detail

/// key -> (reader, writer) over a simulation_config
struct config_key {
  std::function<void(simulation_config&, const std::string&, const std::string&)> set;
  std::function<std::string(const simulation_config&)> get;
};

inline const std::vector<std::pair<std::string, config_key>>& config_keys() {
  using detail::parse_double;
  using detail::parse_int;
#define CHEBSHOCK_KEY(name, member, parse, show)                                       \
  {name,                                                                                \
   {[](simulation_config& c, const std::string& k, const std::string& v) { c.member = parse(k, v); }, \
    [](const simulation_config& c) { return show(c.member); }}}
#define CHEBSHOCK_REAL(name, member) CHEBSHOCK_KEY(name, member, parse_double, fmt_double)
#define CHEBSHOCK_INT(name, member) CHEBSHOCK_KEY(name, member, parse_int, std::to_string)
  static const std::vector<std::pair<std::string, config_key>> keys = {
      CHEBSHOCK_INT("order", solver.order),
      CHEBSHOCK_INT("s", solver.s),
      CHEBSHOCK_REAL("c", solver.c),
      CHEBSHOCK_REAL("x0", solver.x0),
      CHEBSHOCK_REAL("sigma", solver.sigma),
      CHEBSHOCK_REAL("cfl", solver.cfl),
      CHEBSHOCK_REAL("t_end", solver.t_end),
      CHEBSHOCK_REAL("snapshot_interval", solver.snapshot_interval),
      {"factor_families",
       {[](simulation_config& c, const std::string& k, const std::string& v) {
          c.detection.families = detail::parse_families(k, v);
        },
        [](const simulation_config& c) { return detail::join_families(c.detection.families); }}},
      CHEBSHOCK_INT("poly_order", detection.poly_order),
      CHEBSHOCK_REAL("slope_threshold", detection.slope_threshold),
      CHEBSHOCK_INT("sweep_kmin", detection.sweep_kmin),
      CHEBSHOCK_INT("sweep_step", detection.sweep_step),
      CHEBSHOCK_REAL("height_floor", detection.height_floor),
      CHEBSHOCK_REAL("flat_floor", detection.flat_floor),
      CHEBSHOCK_REAL("rel_frac", detection.rel_frac),
      CHEBSHOCK_REAL("abs_floor", detection.abs_floor),
      CHEBSHOCK_REAL("confirm_floor", detection.confirm_floor),
      CHEBSHOCK_REAL("width_factor", detection.width_factor),
      CHEBSHOCK_REAL("two_sided_theta", mollifier.two_sided_theta),
      CHEBSHOCK_REAL("two_sided_beta", mollifier.two_sided_beta),
      CHEBSHOCK_REAL("one_sided_theta", mollifier.one_sided_theta),
      CHEBSHOCK_REAL("one_sided_beta", mollifier.one_sided_beta),
      {"outdir",
       {[](simulation_config& c, const std::string&, const std::string& v) { c.outdir = v; },
        [](const simulation_config& c) { return c.outdir; }}},
  };
#undef CHEBSHOCK_REAL
#undef CHEBSHOCK_INT
#undef CHEBSHOCK_KEY
  return keys;
}

inline void validate(const simulation_config& c) {
  try {
    validate(c.solver);
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
  const auto& d = c.detection;
  auto bad = [](const std::string& k, const std::string& why) { throw config_error(k + ": " + why); };
  if (d.poly_order < 1) bad("poly_order", "must be >= 1");
  if (d.sweep_kmin < 0) bad("sweep_kmin", "must be >= 0 (0 selects the default)");
  if (d.sweep_step < 1) bad("sweep_step", "must be >= 1");
  if (c.solver.order < sweep_start(c.solver.order, d) + 4) bad("sweep_kmin", "leaves fewer than 5 sweep orders");
  if (!(d.height_floor > 0)) bad("height_floor", "must be > 0");
  if (!(d.flat_floor >= 0)) bad("flat_floor", "must be >= 0");
  if (!(d.rel_frac >= 0 && d.rel_frac < 1)) bad("rel_frac", "must lie in [0,1)");
  if (!(d.abs_floor >= 0)) bad("abs_floor", "must be >= 0");
  if (!(d.confirm_floor >= 0)) bad("confirm_floor", "must be >= 0");
  if (!(d.width_factor > 0)) bad("width_factor", "must be > 0");
  const auto& m = c.mollifier;
  if (!(m.two_sided_theta > 0 && m.two_sided_theta <= 1)) bad("two_sided_theta", "must lie in (0,1]");
  if (!(m.one_sided_theta > 0 && m.one_sided_theta <= 1)) bad("one_sided_theta", "must lie in (0,1]");
  if (!(m.two_sided_beta > 0)) bad("two_sided_beta", "must be > 0");
  if (!(m.one_sided_beta > 0)) bad("one_sided_beta", "must be > 0");
}

/// `key = value` lines, `#` starts a comment.
inline simulation_config parse_config(const std::string& text) {
  simulation_config c;
  std::map<std::string, const config_key*> index;
  for (auto& [k, v] : config_keys()) index[k] = &v;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    auto it = index.find(key);
    if (it == index.end()) throw config_error(key + ": unknown key");
    it->second->set(c, key, val);
  }
  validate(c);
  return c;
}

inline simulation_config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string write_config(const simulation_config& c) {
  std::string out;
  for (auto& [k, v] : config_keys()) out += k + " = " + v.get(c) + "\n";
  return out;
}

inline nlohmann::json config_json(const simulation_config& c) {
  nlohmann::json j = nlohmann::json::object();
  for (auto& [k, v] : config_keys()) j[k] = v.get(c);
  return j;
}

enum class treatment { none, two_sided, one_sided };

inline std::string to_string(treatment t) {
  switch (t) {
    case treatment::none: return "None";
    case treatment::two_sided: return "TwoSided";
    case treatment::one_sided: return "OneSided";
  }
  return "?";
}

struct processed_snapshot {
  double time = 0;
  vec nodes;
  vec raw_nodal;
  vec modal;
  edge_report report;
  std::optional<vec> mollified_nodal;
  treatment applied = treatment::none;
  minmod_profile profile;
  std::string error;  // mollifier failure, batch continues
};

inline processed_snapshot postprocess_snapshot(const solver_state& st, const simulation_config& cfg) {
  processed_snapshot ps;
  ps.time = st.time;
  ps.nodes = st.field.g().nodes;
  ps.raw_nodal = st.field.nodal;
  ps.modal = st.field.modal;
  ps.report = detect_edges(st.field.modal, max_abs(st.field.nodal), cfg.detection, &ps.profile);
  if (ps.report.label == edge_label::smooth) return ps;
  ps.applied = ps.report.label == edge_label::discontinuous ? treatment::one_sided : treatment::two_sided;
  try {
    ps.mollified_nodal = mollify(st.field, ps.report, cfg.mollifier);
  } catch (const mollifier_error& e) {
    ps.error = e.what();
  }
  return ps;
}

/// One task per snapshot; results come back in input order.
inline std::vector<processed_snapshot> postprocess_all(const std::vector<solver_state>& states,
                                                       const simulation_config& cfg) {
  std::vector<std::future<processed_snapshot>> jobs;
  jobs.reserve(states.size());
  for (const auto& st : states)
    jobs.push_back(std::async(std::launch::async, [&st, &cfg] { return postprocess_snapshot(st, cfg); }));
  std::vector<processed_snapshot> out;
  out.reserve(states.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline nlohmann::json report_json(const edge_report& r) {
  using nlohmann::json;
  json edges = json::array();
  for (auto& e : r.edges) edges.push_back({{"location", e.location}, {"height", e.height}, {"sign", e.sign}});
  json cands = json::array();
  for (auto& c : r.candidates)
    cands.push_back({{"location", c.location}, {"height", c.height}, {"bracket", {c.lo, c.hi}}});
  return {
      {"label", to_string(r.label)},
      {"edges", edges},
      {"rejected", r.rejected},
      {"candidates", cands},
      {"slope", r.fit.slope},
      {"slope_fit",
       {{"orders", r.fit.sampled_orders},
        {"peak_heights", r.fit.peak_heights},
        {"slope", r.fit.slope},
        {"intercept", r.fit.intercept},
        {"degenerate", r.fit.degenerate}}},
      {"thresholds",
       {{"slope_threshold", r.thresholds.slope_threshold},
        {"rel_frac", r.thresholds.rel_frac},
        {"abs_floor", r.thresholds.abs_floor},
        {"confirm_floor", r.thresholds.confirm_floor},
        {"width_factor", r.thresholds.width_factor},
        {"peak_tau", r.thresholds.peak_tau},
        {"confirm_tau", r.thresholds.confirm_tau}}},
  };
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& body,
                       std::vector<std::filesystem::path>& written) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  written.push_back(p);
  out << body;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace detail

inline std::string snapshot_csv(const processed_snapshot& s) {
  std::string out = "x,u_raw,u_mollified\n";
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    out += fmt_double(s.nodes[i]) + "," + fmt_double(s.raw_nodal[i]) + ",";
    if (s.mollified_nodal) out += fmt_double((*s.mollified_nodal)[i]);
    out += "\n";
  }
  return out;
}

inline std::string minmod_csv(const minmod_profile& p) {
  std::string out = "x,minmod\n";
  for (std::size_t i = 0; i < p.abscissae.size(); ++i)
    out += fmt_double(p.abscissae[i]) + "," + fmt_double(p.minmod[i]) + "\n";
  return out;
}

/// Writes snap_<i>.csv, minmod_<i>.csv and manifest.json; removes partial
/// output on failure.
inline std::filesystem::path write_outputs(const std::vector<processed_snapshot>& snaps,
                                           const std::filesystem::path& outdir,
                                           const simulation_config& cfg,
                                           const nlohmann::json& extra = nlohmann::json::object()) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  try {
    fs::create_directories(outdir);
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i = 0; i < snaps.size(); ++i) {
      const auto& s = snaps[i];
      std::string snap = "snap_" + std::to_string(i) + ".csv";
      std::string mm = "minmod_" + std::to_string(i) + ".csv";
      detail::write_file(outdir / snap, snapshot_csv(s), written);
      detail::write_file(outdir / mm, minmod_csv(s.profile), written);
      nlohmann::json e = {{"index", i},           {"time", s.time},
                          {"file", snap},         {"minmod_file", mm},
                          {"rows", s.nodes.size()}, {"treatment", to_string(s.applied)},
                          {"edge_report", report_json(s.report)}};
      if (!s.error.empty()) e["error"] = s.error;
      list.push_back(e);
    }
    nlohmann::json man = {{"snapshots", list}, {"config", config_json(cfg)}};
    for (auto& [k, v] : extra.items()) man[k] = v;
    auto path = outdir / "manifest.json";
    detail::write_file(path, man.dump(2) + "\n", written);
    return path;
  } catch (...) {
    std::error_code ec;
    for (auto& p : written) fs::remove(p, ec);
    throw;
  }
}

struct pipeline_result {
  run_result run;
  std::vector<processed_snapshot> snapshots;
};

inline pipeline_result run_pipeline(const simulation_config& cfg) {
  validate(cfg);
  pipeline_result r;
  r.run = run_simulation(cfg.solver);
  r.snapshots = postprocess_all(r.run.snapshots, cfg);
  return r;
}

}  // namespace chebshock
