#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "concentration.hpp"
#include "spectral.hpp"

namespace chebshock {

enum class edge_label { smooth, resolution_limited, discontinuous };

inline std::string to_string(edge_label l) {
  switch (l) {
    case edge_label::smooth: return "Smooth";
    case edge_label::resolution_limited: return "ResolutionLimited";
    case edge_label::discontinuous: return "Discontinuous";
  }
  return "?";
}

struct detection_config {
  std::vector<factor_family> families{factor_family::trigonometric};
  int poly_order = 1;
  double slope_threshold = -0.02;
  int sweep_kmin = 0;          // 0: max(16, ceil(2N/3))
  int sweep_step = 1;
  double height_floor = 1e-14;  // applied to h(K) before the log
  double flat_floor = 1e-9;     // every h(K) below this -> smooth
  double rel_frac = 0.1;
  double abs_floor = 0.02;      // times max nodal |u|
  double confirm_floor = 0.4;   // times max nodal |u|, secondary search only
  double width_factor = 2.0;
  double edge_epsilon = 1e-6;
};

/// j_mu(x) = (pi sqrt(1-x^2)/N) sum_k mu(k/N) a_k T'_k(x); zero at |x| = 1.
inline vec jump_approx(const vec& modal, const concentration_factor& mu, const vec& xs) {
  const int N = static_cast<int>(modal.size()) - 1;
  if (N < 1) throw std::invalid_argument("jump approximation needs order >= 1");
  vec w(modal.size(), 0.0);
  for (int k = 1; k <= N; ++k) w[k] = mu(double(k) / N) * modal[k];
  vec out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double x = xs[i];
    if (x < -1.0 || x > 1.0) throw std::out_of_range("jump abscissa outside [-1,1]");
    double r = 1.0 - x * x;
    out[i] = r <= 0 ? 0.0 : std::numbers::pi * std::sqrt(r) / N * clenshaw_derivative(w, x);
  }
  return out;
}

/// Pointwise min when all rows are positive, max when all negative, else 0.
inline vec minmod_combine(const std::vector<vec>& rows) {
  if (rows.empty()) throw std::invalid_argument("minmod of no rows");
  const std::size_t n = rows.front().size();
  for (auto& r : rows)
    if (r.size() != n) throw std::invalid_argument("minmod rows differ in length");
  vec out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    bool pos = true, neg = true;
    double lo = rows[0][i], hi = rows[0][i];
    for (auto& r : rows) {
      pos = pos && r[i] > 0;
      neg = neg && r[i] < 0;
      lo = std::min(lo, r[i]);
      hi = std::max(hi, r[i]);
    }
    out[i] = pos ? lo : (neg ? hi : 0.0);
  }
  return out;
}

struct minmod_profile {
  vec abscissae;
  std::vector<vec> jump_approxs;
  vec minmod;

  double max_abs() const {
    double m = 0;
    for (double v : minmod) m = std::max(m, std::abs(v));
    return m;
  }
};

inline vec evaluation_grid(int N, double eps = 1e-6) {
  const int n = 4 * N + 1;
  vec xs(n);
  for (int i = 0; i < n; ++i) xs[i] = (-1.0 + eps) + (2.0 - 2.0 * eps) * i / (n - 1);
  return xs;
}

inline minmod_profile build_profile(const vec& modal, const std::vector<concentration_factor>& factors,
                                    double eps = 1e-6) {
  minmod_profile p;
  p.abscissae = evaluation_grid(static_cast<int>(modal.size()) - 1, eps);
  for (auto& f : factors) p.jump_approxs.push_back(jump_approx(modal, f, p.abscissae));
  p.minmod = minmod_combine(p.jump_approxs);
  return p;
}

inline std::vector<concentration_factor> factors_for(const detection_config& cfg) {
  return build_concentration_factors(cfg.families, cfg.poly_order);
}

struct slope_fit {
  std::vector<int> sampled_orders;
  vec peak_heights;
  double slope = 0;
  double intercept = 0;
  bool degenerate = false;
};

inline std::pair<double, double> least_squares_line(const vec& x, const vec& y) {
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  double b = sxy / sxx;
  return {b, my - b * mx};
}

inline int sweep_start(int N, const detection_config& cfg) {
  return cfg.sweep_kmin > 0 ? cfg.sweep_kmin : std::max(16, (2 * N + 2) / 3);
}

struct smoothness_result {
  slope_fit fit;
  bool is_smooth = false;
};

inline smoothness_result classify_smoothness(const vec& modal, const detection_config& cfg) {
  const int N = static_cast<int>(modal.size()) - 1;
  const int k0 = sweep_start(N, cfg);
  if (cfg.sweep_step < 1) throw std::invalid_argument("sweep step must be >= 1");
  if (k0 < 1 || N < k0 + 4) throw std::invalid_argument("slope sweep too short for order " + std::to_string(N));
  auto factors = factors_for(cfg);
  smoothness_result r;
  vec ks, logh;
  bool all_flat = true;
  for (int K = k0; K <= N; K += cfg.sweep_step) {
    vec a = downsample(modal, K);
    double h = build_profile(a, factors, cfg.edge_epsilon).max_abs();
    all_flat = all_flat && h < cfg.flat_floor;
    h = std::max(h, cfg.height_floor);
    r.fit.sampled_orders.push_back(K);
    r.fit.peak_heights.push_back(h);
    ks.push_back(K);
    logh.push_back(std::log(h));
  }
  if (ks.size() < 2) throw std::invalid_argument("slope sweep has fewer than two orders");
  std::tie(r.fit.slope, r.fit.intercept) = least_squares_line(ks, logh);
  r.fit.degenerate = all_flat;
  r.is_smooth = all_flat || r.fit.slope < cfg.slope_threshold;
  return r;
}

struct peak_candidate {
  std::size_t index = 0;
  double location = 0;
  double height = 0;
  double lo = 0, hi = 0;  // bracketing collocation interval

  double spacing() const { return hi - lo; }
};

// strict local maxima, plateaus resolved to their middle
inline std::vector<std::size_t> local_maxima(const vec& a) {
  std::vector<std::size_t> idx;
  const std::size_t n = a.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (a[i] > a[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && a[j + 1] == a[i]) ++j;
      if (j + 1 < n && a[j + 1] < a[i]) idx.push_back((i + j) / 2);
      i = j + 1;
    } else {
      ++i;
    }
  }
  return idx;
}

inline std::vector<peak_candidate> peaks_above(const vec& xs, const vec& m, const grid& g, double tau) {
  vec a(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) a[i] = std::abs(m[i]);
  std::vector<peak_candidate> out;
  for (std::size_t i : local_maxima(a)) {
    if (!(a[i] > tau)) continue;
    auto [lo, hi] = g.bracket(xs[i]);
    out.push_back({i, xs[i], m[i], lo, hi});
  }
  return out;
}

inline double peak_threshold(const minmod_profile& p, double umax, const detection_config& cfg) {
  return std::max(cfg.rel_frac * p.max_abs(), cfg.abs_floor * umax);
}

inline std::vector<peak_candidate> find_peaks(const minmod_profile& p, const grid& g, double umax,
                                              const detection_config& cfg) {
  if (p.minmod.empty()) throw std::invalid_argument("empty minmod profile");
  return peaks_above(p.abscissae, p.minmod, g, peak_threshold(p, umax, cfg));
}

/// Gaussian kernel exp(-d^2/(2 w^2)), w = half the bracketing interval, unit
/// interior mass; values fall off within a few w of the ends.
inline vec smooth_minmod(const minmod_profile& p, double center, const grid& g) {
  auto [lo, hi] = g.bracket(center);
  const double om = (hi - lo) / 2;
  const vec& xs = p.abscissae;
  const double h = xs[1] - xs[0];
  const long r = static_cast<long>(std::ceil(8 * om / h)) + 1;
  double norm = 0;
  for (long j = -r; j <= r; ++j) norm += std::exp(-(j * h) * (j * h) / (2 * om * om));
  const long n = static_cast<long>(xs.size());
  vec out(xs.size(), 0.0);
  for (long a = 0; a < n; ++a) {
    double s = 0;
    for (long b = std::max(0L, a - r); b <= std::min(n - 1, a + r); ++b) {
      double d = xs[a] - xs[b];
      s += std::exp(-d * d / (2 * om * om)) * p.minmod[b];
    }
    out[a] = s / norm;
  }
  return out;
}

struct prominence {
  double value = 0;
  double width = 0;
};

/// Prominence of a[i] and the width of the peak at half that prominence.
inline prominence half_prominence_width(const vec& xs, const vec& a, std::size_t i) {
  const std::size_t n = a.size();
  const double p = a[i];
  double lmin = p, rmin = p;
  for (std::size_t j = i; j > 0 && a[j - 1] <= p;) lmin = std::min(lmin, a[--j]);
  for (std::size_t k = i; k + 1 < n && a[k + 1] <= p;) rmin = std::min(rmin, a[++k]);
  const double prom = p - std::max(lmin, rmin);
  const double lvl = p - prom / 2;
  std::size_t j = i;
  while (j > 0 && a[j] > lvl) --j;
  double xl = a[j] > lvl ? xs[j] : xs[j] + (lvl - a[j]) / (a[j + 1] - a[j]) * (xs[j + 1] - xs[j]);
  std::size_t k = i;
  while (k + 1 < n && a[k] > lvl) ++k;
  double xr = a[k] > lvl ? xs[k] : xs[k] - (lvl - a[k]) / (a[k - 1] - a[k]) * (xs[k] - xs[k - 1]);
  return {prom, xr - xl};
}

struct edge {
  double location = 0;
  double height = 0;
  int sign = 1;
};

struct thresholds_used {
  double slope_threshold = 0;
  double rel_frac = 0;
  double abs_floor = 0;
  double confirm_floor = 0;
  double width_factor = 0;
  double peak_tau = 0;
  double confirm_tau = 0;
};

struct edge_report {
  edge_label label = edge_label::smooth;
  std::vector<edge> edges;
  std::vector<double> rejected;
  std::vector<peak_candidate> candidates;
  slope_fit fit;
  thresholds_used thresholds;
};

inline thresholds_used base_thresholds(const detection_config& cfg) {
  thresholds_used t;
  t.slope_threshold = cfg.slope_threshold;
  t.rel_frac = cfg.rel_frac;
  t.abs_floor = cfg.abs_floor;
  t.confirm_floor = cfg.confirm_floor;
  t.width_factor = cfg.width_factor;
  return t;
}

/// Confirm candidates that keep a narrow peak after grid-scale smoothing.
inline edge_report reject_spurious(const minmod_profile& p, const std::vector<peak_candidate>& cands,
                                   const grid& g, double umax, const detection_config& cfg) {
  if (cands.empty()) throw std::invalid_argument("no candidates to screen");
  edge_report rep;
  rep.candidates = cands;
  rep.thresholds = base_thresholds(cfg);
  const double tau = peak_threshold(p, umax, cfg);
  const double tc = std::max(tau, cfg.confirm_floor * umax);
  rep.thresholds.peak_tau = tau;
  rep.thresholds.confirm_tau = tc;

  std::vector<char> ok(cands.size(), 0);
  for (std::size_t c = 0; c < cands.size(); ++c) {
    const auto& cand = cands[c];
    const double dx = cand.spacing();
    vec sm = smooth_minmod(p, cand.location, g);
    vec asm_(sm.size());
    for (std::size_t i = 0; i < sm.size(); ++i) asm_[i] = std::abs(sm[i]);
    for (auto& q : peaks_above(p.abscissae, sm, g, tc)) {
      if (std::abs(q.location - cand.location) > dx) continue;
      if (half_prominence_width(p.abscissae, asm_, q.index).width <= cfg.width_factor * dx) {
        ok[c] = 1;
        break;
      }
    }
  }
  for (std::size_t c = 0; c < cands.size(); ++c) {
    if (ok[c])
      rep.edges.push_back({cands[c].location, cands[c].height, cands[c].height < 0 ? -1 : 1});
    else
      rep.rejected.push_back(cands[c].location);
  }
  rep.label = rep.edges.empty() ? edge_label::resolution_limited : edge_label::discontinuous;
  return rep;
}

/// Full decision tree on one field.
inline edge_report detect_edges(const vec& modal, double umax, const detection_config& cfg,
                                minmod_profile* profile_out = nullptr) {
  const int N = static_cast<int>(modal.size()) - 1;
  auto sm = classify_smoothness(modal, cfg);
  auto factors = factors_for(cfg);
  minmod_profile p = build_profile(modal, factors, cfg.edge_epsilon);
  if (profile_out) *profile_out = p;
  edge_report rep;
  rep.thresholds = base_thresholds(cfg);
  rep.fit = sm.fit;
  if (sm.is_smooth) return rep;
  const grid& g = operators_for(N)->g;
  auto cands = find_peaks(p, g, umax, cfg);
  rep.thresholds.peak_tau = peak_threshold(p, umax, cfg);
  if (cands.empty()) return rep;
  auto screened = reject_spurious(p, cands, g, umax, cfg);
  screened.fit = sm.fit;
  return screened;
}

}  // namespace chebshock
