#pragma once
// Reference computations that share no code with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double cheb(int n, double x) { return std::cos(n * std::acos(x)); }

// T'_n(x) = n sin(n t) / sin t, x = cos t
inline double cheb_prime(int n, double x) {
  if (std::abs(x) == 1.0) return (x > 0 || n % 2 ? 1.0 : -1.0) * n * n;
  double t = std::acos(x);
  return n * std::sin(n * t) / std::sin(t);
}

inline std::vector<double> cgl_nodes(int N) {
  std::vector<double> x(N + 1);
  for (int i = 0; i <= N; ++i) x[i] = std::cos(pi * (N - i) / N);
  x[0] = -1;
  x[N] = 1;
  return x;
}

// int_{-1}^{1} x^k (1-x^2)^{-1/2} dx
inline double weighted_moment(int k) {
  if (k % 2) return 0.0;
  double r = pi;
  for (int j = 1; j <= k; j += 2) r *= double(j) / (j + 1);
  return r;
}

// partial sum by the trigonometric form
inline double partial_sum(const std::vector<double>& a, double x) {
  double s = 0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * cheb(int(n), x);
  return s;
}

// discrete Chebyshev coefficients from values at CGL nodes, written as the
// double-primed cosine sum
inline std::vector<double> cgl_coefficients(const std::vector<double>& u) {
  const int N = int(u.size()) - 1;
  std::vector<double> a(N + 1);
  for (int n = 0; n <= N; ++n) {
    double s = 0;
    for (int j = 0; j <= N; ++j) {
      double f = (j == 0 || j == N) ? 0.5 : 1.0;
      s += f * u[j] * std::cos(pi * n * (N - j) / N);
    }
    a[n] = s * 2.0 / N * ((n == 0 || n == N) ? 0.5 : 1.0);
  }
  return a;
}

inline double tophat(double x) { return (x > -0.7 && x < -0.2) ? 1.0 : 0.0; }

inline double gaussian(double x, double x0, double sigma) {
  return std::exp(-(x - x0) * (x - x0) / (2 * sigma * sigma));
}

// u(x,t) = g(xi) with x = xi + g(xi) t, root bracketed in [x-t, x] (g in [0,1])
inline double characteristic(double x, double t, double x0, double sigma) {
  auto f = [&](double z) { return z + gaussian(z, x0, sigma) * t - x; };
  double lo = x - t - 1e-12, hi = x + 1e-12;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? hi : lo) = mid;
  }
  return gaussian(0.5 * (lo + hi), x0, sigma);
}

// nearest non-increasing sequence in least squares (pool adjacent violators)
inline std::vector<double> isotonic_decreasing(const std::vector<double>& y) {
  struct block { double mean; int n; };
  std::vector<block> b;
  for (double v : y) {
    b.push_back({v, 1});
    while (b.size() > 1 && b[b.size() - 2].mean < b.back().mean) {
      block r = b.back();
      b.pop_back();
      block& l = b.back();
      l.mean = (l.mean * l.n + r.mean * r.n) / (l.n + r.n);
      l.n += r.n;
    }
  }
  std::vector<double> out;
  for (auto& k : b) out.insert(out.end(), k.n, k.mean);
  return out;
}

// largest deviation from the nearest rise-then-fall profile peaked at argmax
inline double unimodal_deviation(const std::vector<double>& y) {
  std::size_t ip = 0;
  for (std::size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[ip]) ip = i;
  std::vector<double> left(y.begin(), y.begin() + ip + 1);
  for (double& v : left) v = -v;
  auto lf = isotonic_decreasing(left);
  std::vector<double> right(y.begin() + ip, y.end());
  auto rf = isotonic_decreasing(right);
  double d = 0;
  for (std::size_t i = 0; i <= ip; ++i) d = std::max(d, std::abs(y[i] + lf[i]));
  for (std::size_t i = 0; i < right.size(); ++i) d = std::max(d, std::abs(right[i] - rf[i]));
  return d;
}

// physicists' Hermite polynomial by its textbook recurrence
inline double hermite(int n, double y) {
  double h0 = 1, h1 = 2 * y;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    double h2 = 2 * y * h1 - 2 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

inline double hermite_kernel(double y, int p) {
  double s = 0, fact = 1;
  for (int j = 0; j <= p; ++j) {
    if (j) fact *= j;
    s += ((j % 2) ? -1.0 : 1.0) / (std::pow(4.0, j) * fact * std::sqrt(pi)) * hermite(2 * j, y);
  }
  return std::exp(-y * y) * s;
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  double h = (b - a) / n, s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

inline std::vector<double> uniform(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

}  // namespace oracle
