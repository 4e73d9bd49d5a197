#ifndef SEMILAB_QUADRATURE_HPP
#define SEMILAB_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "semilab/types.hpp"

namespace semilab {

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence. Deterministic; accurate to ~1e-15 for n <= 512.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
      // Chebyshev initial guess for the i-th root.
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

/// A one-dimensional quadrature rule as explicit points and weights.
struct QuadratureGrid {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Append a Gauss-Legendre panel over [a, b] to a grid.
inline void append_gauss_panel(QuadratureGrid& grid, const GaussLegendre& rule,
                               double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    grid.points.push_back(mid + half * rule.nodes[i]);
    grid.weights.push_back(half * rule.weights[i]);
  }
}

/// Time-quadrature grid for integrals over [0, T] of semigroup integrands:
/// one panel [0, t_min] plus panels geometric between t_min = T*tmin_fraction
/// and T, 3-point Gauss per panel. Integrands of degenerate semigroups are
/// bounded but only continuous on (0, T], so points stay strictly positive
/// and cluster near 0.
inline QuadratureGrid geometric_time_grid(double T, int total_nodes,
                                          double tmin_fraction = 1e-8) {
  require(T > 0.0, ErrorCode::DimensionMismatch, "time horizon must be positive");
  const int per_panel = 3;
  const int panels = std::max(2, total_nodes / per_panel);
  const double tmin = T * tmin_fraction;
  static const GaussLegendre rule(per_panel);

  QuadratureGrid grid;
  grid.points.reserve(static_cast<std::size_t>(panels + 1) * per_panel);
  grid.weights.reserve(grid.points.capacity());

  append_gauss_panel(grid, rule, 0.0, tmin);
  const double ratio = std::pow(T / tmin, 1.0 / (panels - 1));
  double left = tmin;
  for (int k = 1; k < panels; ++k) {
    double right = (k == panels - 1) ? T : tmin * std::pow(ratio, k);
    append_gauss_panel(grid, rule, left, right);
    left = right;
  }
  return grid;
}

/// Geometrically spaced sample points on [a, b] (a > 0), endpoints included.
inline std::vector<double> geometric_points(double a, double b, int count) {
  require(a > 0.0 && b > a && count >= 2, ErrorCode::DimensionMismatch,
          "geometric_points needs 0 < a < b and count >= 2");
  std::vector<double> pts(count);
  const double ratio = std::pow(b / a, 1.0 / (count - 1));
  pts[0] = a;
  for (int i = 1; i < count - 1; ++i) pts[i] = a * std::pow(ratio, i);
  pts[count - 1] = b;
  return pts;
}

/// Uniform sample points on [a, b], endpoints included.
inline std::vector<double> uniform_points(double a, double b, int count) {
  require(count >= 2, ErrorCode::DimensionMismatch, "need at least two points");
  std::vector<double> pts(count);
  for (int i = 0; i < count; ++i)
    pts[i] = a + (b - a) * static_cast<double>(i) / (count - 1);
  return pts;
}

/// Adaptive wrapper for the time integrals of the convergence metrics:
/// evaluates `value(nodes)` on a doubling node budget until the result is
/// stable to `stable_rtol`, throwing QuadratureUnstable when even the final
/// doubling moves the result by more than `unstable_rtol`.
inline double adaptive_time_integral(const std::function<double(int)>& value,
                                     int base_nodes, double stable_rtol = 1e-3,
                                     double unstable_rtol = 0.10,
                                     double absolute_floor = 1e-13,
                                     int max_doublings = 3) {
  double previous = value(base_nodes);
  int nodes = base_nodes;
  for (int k = 0; k < max_doublings; ++k) {
    nodes *= 2;
    double current = value(nodes);
    double change = std::abs(current - previous);
    double scale = std::max(std::abs(current), absolute_floor);
    if (change <= stable_rtol * scale) return current;
    if (k == max_doublings - 1 && change > unstable_rtol * scale)
      fail(ErrorCode::QuadratureUnstable,
           "time quadrature did not settle after refinement");
    previous = current;
  }
  return previous;
}

}  // namespace semilab

#endif  // SEMILAB_QUADRATURE_HPP
