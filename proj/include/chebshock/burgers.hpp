#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace chebshock {

struct filter_matrix {
  int order = 0;
  int dissipation_order = 2;
  vec diagonal;  // (n/N)^{2s}
};

inline filter_matrix build_filter(int N, int s) {
  if (s < 1) throw std::invalid_argument("dissipation order s must be >= 1");
  filter_matrix f{N, s, vec(N + 1)};
  for (int n = 0; n <= N; ++n) f.diagonal[n] = std::pow(double(n) / N, 2 * s);
  return f;
}

struct solver_config {
  int order = 60;
  int s = 2;
  double c = 0.01;
  double x0 = 0.0;
  double sigma = 0.15;
  double cfl = 0.5;
  double t_end = 3.0;
  double snapshot_interval = 0.04;
  bool advection = true;  // off only for filter tests
};

inline void validate(const solver_config& c) {
  auto bad = [](const std::string& key, const std::string& why) {
    throw std::invalid_argument(key + ": " + why);
  };
  if (c.order < 8) bad("order", "must be >= 8");
  if (c.s < 1) bad("s", "must be >= 1");
  if (!(c.c >= 0)) bad("c", "must be >= 0");
  if (!(c.cfl > 0 && c.cfl <= 1)) bad("cfl", "must lie in (0,1]");
  if (!(c.sigma > 0)) bad("sigma", "must be > 0");
  if (!(c.t_end > 0)) bad("t_end", "must be > 0");
  if (!(c.snapshot_interval > 0)) bad("snapshot_interval", "must be > 0");
}

struct solver_state {
  double time = 0;
  spectral_field field;
  long step_count = 0;
};

struct numerical_abort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline spectral_field gaussian_ic(const grid& g, double x0, double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("sigma must be > 0");
  vec u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double z = g.nodes[i] - x0;
    u[i] = std::exp(-z * z / (2 * sigma * sigma));
  }
  return field_from_nodal(std::move(u));
}

/// Nodal operators for the filtered right-hand side.
class burgers_operator {
public:
  burgers_operator(int N, int s, double c, bool advection = true)
      : ops_(operators_for(N)), filter_(build_filter(N, s)), c_(c), advection_(advection) {
    matrix F(N + 1, N + 1);
    for (int n = 0; n <= N; ++n) F(n, n) = filter_.diagonal[n];
    filter_nodal_ = ops_->synthesis * (F * ops_->analysis);
  }

  // -u (N u) - c S F A u
  vec rhs(const vec& u) const {
    vec out = filter_nodal_.apply(u);
    for (double& v : out) v *= -c_;
    if (advection_) {
      vec du = ops_->diff_nodal.apply(u);
      for (std::size_t i = 0; i < u.size(); ++i) out[i] -= u[i] * du[i];
    }
    return out;
  }

  // classical RK4, u_0 <- u_N after every stage
  vec step(const vec& u, double dt) const {
    auto couple = [](vec& v) { v.front() = v.back(); };
    auto axpy = [](const vec& a, double h, const vec& k) {
      vec r(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + h * k[i];
      return r;
    };
    vec k1 = rhs(u);
    vec u2 = axpy(u, dt / 2, k1);
    couple(u2);
    vec k2 = rhs(u2);
    vec u3 = axpy(u, dt / 2, k2);
    couple(u3);
    vec k3 = rhs(u3);
    vec u4 = axpy(u, dt, k3);
    couple(u4);
    vec k4 = rhs(u4);
    vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    couple(out);
    return out;
  }

  const spectral_operators& ops() const { return *ops_; }
  std::shared_ptr<const spectral_operators> ops_ptr() const { return ops_; }
  const filter_matrix& filter() const { return filter_; }

private:
  std::shared_ptr<const spectral_operators> ops_;
  filter_matrix filter_;
  matrix filter_nodal_;
  double c_;
  bool advection_;
};

inline double max_abs(const vec& u) {
  double m = 0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

inline solver_state step(const burgers_operator& op, const solver_state& st, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("dt must be > 0");
  vec u = op.step(st.field.nodal, dt);
  for (double v : u)
    if (!std::isfinite(v))
      throw numerical_abort("non-finite state at t=" + std::to_string(st.time + dt));
  solver_state out{st.time + dt, {op.ops_ptr(), {}, std::move(u)}, st.step_count + 1};
  out.field.modal = analyze(out.field.nodal, op.ops());
  return out;
}

inline std::vector<double> snapshot_times(const solver_config& c) {
  std::vector<double> t;
  const long n = long(std::floor(c.t_end / c.snapshot_interval + 1e-9));
  for (long k = 0; k <= n; ++k) t.push_back(std::min(k * c.snapshot_interval, c.t_end));
  if (c.t_end - t.back() > 1e-12) t.push_back(c.t_end);
  return t;
}

struct run_result {
  std::vector<solver_state> snapshots;
  double max_abs_u = 0;
  double max_modal_ratio = 0;  // largest |a_n| over the run / largest IC |a_n|
  bool aborted = false;
  std::string message;
};

/// Integrates to t_end and keeps the states at the snapshot times.
/// On blow-up the snapshots taken so far are returned with aborted set.
inline run_result run_simulation(const solver_config& cfg,
                                 const std::function<void(const solver_state&)>& on_step = {}) {
  validate(cfg);
  burgers_operator op(cfg.order, cfg.s, cfg.c, cfg.advection);
  const grid& g = op.ops().g;
  const double dxmin = g.min_spacing();
  solver_state st{0.0, gaussian_ic(g, cfg.x0, cfg.sigma), 0};

  run_result r;
  const double ic_modal = max_abs(st.field.modal);
  r.max_abs_u = max_abs(st.field.nodal);
  auto targets = snapshot_times(cfg);
  r.snapshots.push_back(st);
  std::size_t next = 1;
  try {
    while (next < targets.size()) {
      double dt = cfg.cfl * dxmin / std::max(max_abs(st.field.nodal), 0.1);
      bool hit = st.time + dt >= targets[next] - 1e-14;
      if (hit) dt = targets[next] - st.time;
      st = step(op, st, dt);
      if (hit) st.time = targets[next];
      r.max_abs_u = std::max(r.max_abs_u, max_abs(st.field.nodal));
      r.max_modal_ratio = std::max(r.max_modal_ratio, max_abs(st.field.modal) / ic_modal);
      if (on_step) on_step(st);
      if (hit) {
        r.snapshots.push_back(st);
        ++next;
      }
    }
  } catch (const numerical_abort& e) {
    r.aborted = true;
    r.message = e.what();
  }
  return r;
}

}  // namespace chebshock
