#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebshock {

using vec = std::vector<double>;

// dense row-major
template <class Real>
class basic_matrix {
public:
  basic_matrix() = default;
  basic_matrix(std::size_t r, std::size_t c, Real v = Real(0)) : rows_(r), cols_(c), a_(r * c, v) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Real& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  Real operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::vector<Real> apply(const std::vector<Real>& v) const {
    if (v.size() != cols_)
      throw std::invalid_argument("matrix/vector size mismatch");
    std::vector<Real> out(rows_, Real(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      const Real* row = &a_[i * cols_];
      Real s = 0;
      for (std::size_t j = 0; j < cols_; ++j) s += row[j] * v[j];
      out[i] = s;
    }
    return out;
  }

  friend basic_matrix operator*(const basic_matrix& l, const basic_matrix& r) {
    if (l.cols_ != r.rows_)
      throw std::invalid_argument("matrix product size mismatch");
    basic_matrix out(l.rows_, r.cols_);
    for (std::size_t i = 0; i < l.rows_; ++i)
      for (std::size_t k = 0; k < l.cols_; ++k) {
        Real lik = l(i, k);
        if (lik == Real(0)) continue;
        for (std::size_t j = 0; j < r.cols_; ++j) out(i, j) += lik * r(k, j);
      }
    return out;
  }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Real> a_;
};

using matrix = basic_matrix<double>;

/// Chebyshev-Gauss-Lobatto nodes, weights and discrete basis norms.
template <class Real>
struct basic_grid {
  int order = 0;
  std::vector<Real> nodes;
  std::vector<Real> weights;
  std::vector<Real> norms;

  std::size_t size() const { return nodes.size(); }

  // local collocation interval containing x
  std::pair<Real, Real> bracket(Real x) const {
    if (x < Real(-1) || x > Real(1))
      throw std::out_of_range("abscissa outside [-1,1]");
    std::size_t i = 0;
    while (i + 2 < nodes.size() && nodes[i + 1] <= x) ++i;
    return {nodes[i], nodes[i + 1]};
  }

  Real min_spacing() const {
    Real m = nodes[1] - nodes[0];
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) m = std::min(m, nodes[i + 1] - nodes[i]);
    return m;
  }
};

using grid = basic_grid<double>;

template <class Real = double>
basic_grid<Real> build_grid(int order) {
  if (order < 1)
    throw std::invalid_argument("grid order must be >= 1");
  const Real pi = std::numbers::pi_v<Real>;
  basic_grid<Real> g;
  g.order = order;
  const std::size_t n = static_cast<std::size_t>(order) + 1;
  g.nodes.resize(n);
  g.weights.assign(n, pi / order);
  g.norms.assign(n, pi / 2);
  for (std::size_t i = 0; i < n; ++i) g.nodes[i] = -std::cos(pi * Real(i) / Real(order));
  // cos rounding leaves the ends and midpoint a few ulp off
  g.nodes.front() = Real(-1);
  g.nodes.back() = Real(1);
  if (order % 2 == 0) g.nodes[order / 2] = Real(0);
  g.weights.front() = g.weights.back() = pi / (2 * order);
  g.norms.front() = g.norms.back() = pi;
  return g;
}

// T_n(x) by the three-term recurrence
template <class Real>
Real chebyshev_t(int n, Real x) {
  if (n == 0) return Real(1);
  Real t0 = 1, t1 = x;
  for (int k = 1; k < n; ++k) {
    Real t2 = 2 * x * t1 - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}

/// Clenshaw evaluation of sum_n a_n T_n(x).
template <class Real>
Real clenshaw(const std::vector<Real>& a, Real x) {
  Real b1 = 0, b2 = 0;
  for (std::size_t k = a.size(); k-- > 1;) {
    Real b0 = 2 * x * b1 - b2 + a[k];
    b2 = b1;
    b1 = b0;
  }
  return (a.empty() ? Real(0) : a[0]) + x * b1 - b2;
}

/// sum_n a_n T'_n(x) using T'_n = n U_{n-1} and a Clenshaw pass over U.
template <class Real>
Real clenshaw_derivative(const std::vector<Real>& a, Real x) {
  Real b1 = 0, b2 = 0;
  for (std::size_t k = a.size(); k-- > 1;) {
    Real b0 = 2 * x * b1 - b2 + Real(k) * a[k];
    b2 = b1;
    b1 = b0;
  }
  // sum_{j>=0} c_j U_j with c_j = (j+1) a_{j+1}: result is b at j=0
  return b1;
}

inline vec synthesize(const vec& modal, const vec& points) {
  vec out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double x = points[i];
    if (!(x >= -1.0 && x <= 1.0))
      throw std::out_of_range("synthesis point outside [-1,1]: " + std::to_string(x));
    out[i] = clenshaw(modal, x);
  }
  return out;
}

struct spectral_operators {
  grid g;
  matrix analysis;    // nodal -> modal
  matrix synthesis;   // modal -> nodal, T_n(x_i)
  matrix diff_modal;
  matrix diff_nodal;
};

// modal derivative coefficients: b_n = (2/c_n) sum_{m>n, m-n odd} m a_m
inline matrix modal_derivative_matrix(int N) {
  matrix M(N + 1, N + 1);
  for (int n = 0; n <= N; ++n)
    for (int m = n + 1; m <= N; m += 2) M(n, m) = (n == 0 ? 1.0 : 2.0) * m;
  return M;
}

inline spectral_operators build_operators(const grid& g) {
  const int N = g.order;
  const std::size_t n1 = g.size();
  spectral_operators op{g, matrix(n1, n1), matrix(n1, n1), modal_derivative_matrix(N), {}};
  for (std::size_t i = 0; i < n1; ++i) {
    double t0 = 1, t1 = g.nodes[i];
    for (std::size_t n = 0; n < n1; ++n) {
      double t = n == 0 ? 1.0 : (n == 1 ? g.nodes[i] : 2 * g.nodes[i] * t1 - t0);
      if (n >= 2) {
        t0 = t1;
        t1 = t;
      }
      op.synthesis(i, n) = t;
      op.analysis(n, i) = t * g.weights[i] / g.norms[n];
    }
  }
  op.diff_nodal = op.synthesis * (op.diff_modal * op.analysis);
  return op;
}

/// Shared, immutable operators per order.
inline std::shared_ptr<const spectral_operators> operators_for(int order) {
  static std::mutex mtx;
  static std::map<int, std::shared_ptr<const spectral_operators>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  auto op = std::make_shared<const spectral_operators>(build_operators(build_grid(order)));
  cache.emplace(order, op);
  return op;
}

inline vec analyze(const vec& nodal, const spectral_operators& op) {
  if (nodal.size() != op.g.size())
    throw std::invalid_argument("nodal vector length does not match grid order");
  return op.analysis.apply(nodal);
}

struct spectral_field {
  std::shared_ptr<const spectral_operators> ops;
  vec modal;
  vec nodal;

  int order() const { return ops->g.order; }
  const grid& g() const { return ops->g; }
};

inline spectral_field field_from_nodal(vec nodal) {
  if (nodal.size() < 2)
    throw std::invalid_argument("need at least two nodal values");
  auto op = operators_for(static_cast<int>(nodal.size()) - 1);
  vec modal = analyze(nodal, *op);
  return {op, std::move(modal), std::move(nodal)};
}

struct downsample_map {
  int from_order = 0;
  int to_order = 0;
  matrix D;  // (K+1) x (M+1)
};

inline downsample_map build_downsample(int M, int K) {
  if (K < 1 || K >= M)
    throw std::invalid_argument("downsample requires 1 <= K < M");
  auto low = operators_for(K);
  matrix P(K + 1, M + 1);
  for (int j = 0; j <= K; ++j) {
    double x = low->g.nodes[j], t0 = 1, t1 = x;
    for (int m = 0; m <= M; ++m) {
      double t = m == 0 ? 1.0 : (m == 1 ? x : 2 * x * t1 - t0);
      if (m >= 2) {
        t0 = t1;
        t1 = t;
      }
      P(j, m) = t;
    }
  }
  return {M, K, low->analysis * P};
}

inline vec downsample(const vec& modal, int K) {
  const int M = static_cast<int>(modal.size()) - 1;
  if (K == M) return modal;
  if (K < 1 || K > M)
    throw std::invalid_argument("downsample requires 1 <= K <= M");
  auto low = operators_for(K);
  vec sampled(K + 1);
  for (int j = 0; j <= K; ++j) sampled[j] = clenshaw(modal, low->g.nodes[j]);
  return analyze(sampled, *low);
}

}  // namespace chebshock
