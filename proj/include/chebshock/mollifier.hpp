#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "edge_detect.hpp"
#include "spectral.hpp"

namespace chebshock {

enum class mollifier_kind { two_sided, one_sided };

inline std::string to_string(mollifier_kind k) {
  return k == mollifier_kind::two_sided ? "TwoSided" : "OneSided";
}

struct mollifier_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct mollifier_spec {
  mollifier_kind kind = mollifier_kind::two_sided;
  double theta = 0.3;
  double p_scale = 1.25;
  std::vector<double> edges;  // confirmed; +-1 are always added
  int order = 60;             // sets the quadrature spacing 2/(8N)
  int fixed_p = -1;           // >= 0 overrides p_scale
};

struct mollifier_settings {
  double two_sided_theta = 0.3;
  double two_sided_beta = 1.25;
  double one_sided_theta = 0.8;
  double one_sided_beta = 0.02;
};

/// rho_p(y) = exp(-y^2) sum_{j<=p} (-1)^j H_{2j}(y) / (4^j j! sqrt(pi)).
/// Runs the orthonormal Hermite recurrence so large p does not overflow.
inline double hermite_gauss(double y, int p) {
  double hm = 0, h = 1, acc = 1;
  for (int m = 0; m < 2 * p; ++m) {
    double hn = std::sqrt(2.0 / (m + 1)) * y * h - std::sqrt(double(m) / (m + 1)) * hm;
    hm = h;
    h = hn;
    if ((m + 1) % 2 == 0) {
      int j = (m + 1) / 2;
      // H_2j / (4^j j!) = sqrt((2j)!) / (2^j j!) * orthonormal h_2j
      double c = std::exp(0.5 * std::lgamma(2.0 * j + 1) - j * std::log(2.0) - std::lgamma(j + 1.0));
      acc += (j % 2 ? -c : c) * h;
    }
  }
  return std::exp(-y * y) * acc / std::sqrt(std::numbers::pi);
}

inline std::vector<double> edge_set(const mollifier_spec& s) {
  std::vector<double> e{-1.0, 1.0};
  for (double v : s.edges) {
    if (v < -1.0 || v > 1.0) throw std::invalid_argument("edge outside [-1,1]");
    e.push_back(v);
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

inline double distance_to_edge(const std::vector<double>& edges, double x) {
  double d = 2.0;
  for (double e : edges) d = std::min(d, std::abs(x - e));
  return d;
}

struct kernel_samples {
  std::vector<double> abscissae;
  std::vector<double> values;   // (1/delta) rho_p((x - x')/delta)
  std::vector<double> weights;  // quadrature * values, summing to one
  double delta = 0;
  int p = 0;
  double raw_mass = 0;  // trapezoid mass before renormalisation
};

inline kernel_samples build_kernel(const mollifier_spec& s, double x) {
  if (!(x > -1.0 && x < 1.0)) throw mollifier_error("kernel centre must lie inside (-1,1)");
  auto edges = edge_set(s);
  const double d = distance_to_edge(edges, x);
  if (d <= 1e-12) throw mollifier_error("evaluation point coincides with an edge");
  if (s.theta <= 0 || s.theta > 1) throw std::invalid_argument("theta must lie in (0,1]");

  kernel_samples k;
  k.delta = s.theta * d;
  k.p = s.fixed_p >= 0 ? s.fixed_p : std::max(1, int(std::floor(s.p_scale * k.delta * s.order)));

  double lo = -1.0, hi = 1.0;
  if (s.kind == mollifier_kind::one_sided) {
    for (double e : edges) {
      if (e < x) lo = std::max(lo, e);
      if (e > x) hi = std::min(hi, e);
    }
  }
  const double h = 2.0 / (8.0 * s.order);
  const double R = 6.0 * k.delta;
  const long kl = long(std::ceil((std::max(lo, x - R) - x) / h));
  const long kh = long(std::floor((std::min(hi, x + R) - x) / h));
  for (long j = kl; j <= kh; ++j) {
    double xp = std::clamp(x + j * h, lo, hi);  // rounding can step over the edge
    double v = hermite_gauss((x - xp) / k.delta, k.p) / k.delta;
    double w = v * h * ((j == kl || j == kh) && kl != kh ? 0.5 : 1.0);
    k.abscissae.push_back(xp);
    k.values.push_back(v);
    k.weights.push_back(w);
    k.raw_mass += w;
  }
  if (k.weights.empty() || k.raw_mass == 0) throw mollifier_error("empty kernel support");
  for (double& w : k.weights) w /= k.raw_mass;
  return k;
}

/// Mollified partial sum at arbitrary interior points.
inline vec mollify_at(const vec& modal, const mollifier_spec& s, const vec& points) {
  vec out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto k = build_kernel(s, points[i]);
    double acc = 0;
    for (std::size_t j = 0; j < k.abscissae.size(); ++j)
      acc += k.weights[j] * clenshaw(modal, std::clamp(k.abscissae[j], -1.0, 1.0));
    out[i] = acc;
  }
  return out;
}

inline mollifier_spec spec_for(const edge_report& rep, int order, const mollifier_settings& ms) {
  mollifier_spec s;
  s.order = order;
  if (rep.label == edge_label::discontinuous) {
    s.kind = mollifier_kind::one_sided;
    s.theta = ms.one_sided_theta;
    s.p_scale = ms.one_sided_beta;
    for (auto& e : rep.edges) s.edges.push_back(e.location);
  } else {
    s.kind = mollifier_kind::two_sided;
    s.theta = ms.two_sided_theta;
    s.p_scale = ms.two_sided_beta;
  }
  return s;
}

/// Nodal mollified values. The end nodes sit on the virtual edges and keep
/// their raw values.
inline vec mollify(const spectral_field& f, const edge_report& rep, const mollifier_settings& ms = {}) {
  if (rep.label == edge_label::smooth) throw mollifier_error("smooth fields are not mollified");
  auto s = spec_for(rep, f.order(), ms);
  const auto& x = f.g().nodes;
  vec out = f.nodal;
  vec inner(x.begin() + 1, x.end() - 1);
  vec m = mollify_at(f.modal, s, inner);
  std::copy(m.begin(), m.end(), out.begin() + 1);
  return out;
}

}  // namespace chebshock
