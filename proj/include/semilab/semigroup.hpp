#ifndef SEMILAB_SEMIGROUP_HPP
#define SEMILAB_SEMIGROUP_HPP

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "semilab/operator_core.hpp"
#include "semilab/quadrature.hpp"
#include "semilab/types.hpp"

namespace semilab {

/// Evaluator of the degenerate semigroup S_t generated by -A for the graph A
/// of a FormOperator. With G = L L* and M = L^{-1} K L^{-*},
///
///   S_t = Q exp(-t M) Q*,   Q = B L^{-*},
///
/// where Q is an isometry onto the form domain and Q Q* is the orthogonal
/// projection P. S_t is strongly continuous on (0, infinity) only; S_t -> P
/// as t -> 0, and S_t f = 0 for f orthogonal to V.
///
/// Immutable after construction; evaluations at distinct (t, f) may run
/// concurrently.
class SemigroupEvaluator {
 public:
  explicit SemigroupEvaluator(FormOperator op) : op_(std::move(op)) {
    const Matrix& b = op_.basis();
    // Q = B L^{-*} = (L^{-1} B*)*
    Matrix y = op_.gram_cholesky()
                   .matrixL()
                   .triangularView<Eigen::Lower>()
                   .solve(b.adjoint());
    isometry_ = y.adjoint();
    reduced_ = op_.reduced_generator();

    Eigen::SelfAdjointEigenSolver<Matrix> herm(
        detail::hermitian_part(reduced_));
    herm_min_ = herm.eigenvalues().minCoeff();
    reduced_norm1_ = reduced_.cwiseAbs().colwise().sum().maxCoeff();

    if (op_.symmetric()) {
      spectral_.emplace(reduced_);
    } else {
      // normal M still admits an exact spectral path: its Schur form is
      // diagonal with unitary Q
      Eigen::ComplexSchur<Matrix> schur(reduced_);
      Matrix tri = schur.matrixT();
      Matrix diag_part = tri.diagonal().asDiagonal();
      if ((tri - diag_part).norm() <= 1e-13 * std::max(1.0, tri.norm()))
        normal_.emplace(schur.matrixU(), Vector(tri.diagonal()));
    }
  }

  const FormOperator& source() const { return op_; }
  Index ambient_dim() const { return op_.ambient_dim(); }
  const Matrix& reduced_generator() const { return reduced_; }

  /// Exponential bound pair (M, omega): ||S_t|| <= M e^{omega t}.
  double bound_constant() const { return 1.0; }
  double bound_rate() const { return -herm_min_; }

  /// exp(-t M) on the reduced space.
  Matrix exp_reduced(double t) const {
    check_exp_budget(t);
    if (spectral_) {
      Vector e =
          (-t * spectral_->eigenvalues().array()).exp().matrix().cast<Complex>();
      return spectral_->eigenvectors() * e.asDiagonal() *
             spectral_->eigenvectors().adjoint();
    }
    if (normal_) {
      const auto& [q, eigs] = *normal_;
      Vector e = (-t * eigs.array()).exp().matrix();
      return q * e.asDiagonal() * q.adjoint();
    }
    return Matrix((-t * reduced_).exp());
  }

  /// S_t f. Spectral evaluation for symmetric (or normal) reduced
  /// generators, scaling-and-squaring Pade exponential otherwise.
  Vector apply(double t, const Vector& f) const {
    require(t > 0.0, ErrorCode::DimensionMismatch, "semigroup time must be positive");
    return isometry_ * (exp_reduced(t) * (isometry_.adjoint() * f));
  }

  /// Same-t evaluation on a block of vectors (columns).
  Matrix apply(double t, const Matrix& f) const {
    require(t > 0.0, ErrorCode::DimensionMismatch, "semigroup time must be positive");
    return isometry_ * (exp_reduced(t) * (isometry_.adjoint() * f));
  }

  /// P f, the strong limit of S_t f as t -> 0.
  Vector project(const Vector& f) const {
    return isometry_ * (isometry_.adjoint() * f);
  }

 private:
  void check_exp_budget(double t) const {
    const double growth = std::max(0.0, -herm_min_);
    if (t * growth > 700.0 || t * reduced_norm1_ > 4e16)
      fail(ErrorCode::ExpOverflow,
           "t * ||M|| exceeds the scaling budget (pathological vertex)");
  }

  FormOperator op_;
  Matrix isometry_;
  Matrix reduced_;
  std::optional<Eigen::SelfAdjointEigenSolver<Matrix>> spectral_;
  std::optional<std::pair<Matrix, Vector>> normal_;  // unitary Q, eigenvalues
  double herm_min_ = 0.0;
  double reduced_norm1_ = 0.0;
};

inline Vector semigroup_apply(const SemigroupEvaluator& ev, double t,
                              const Vector& f) {
  return ev.apply(t, f);
}

inline Vector strong_limit_projection_value(const SemigroupEvaluator& ev,
                                            const Vector& f) {
  return ev.project(f);
}

/// Integration contour for the sectorial representation
///   S_t f = (1/2 pi i) \int_Gamma e^{t lambda} (lambda I + A)^{-1} f dlambda:
/// two rays at angles +-angle joined by an arc of radius `radius` around the
/// origin, truncated at |lambda| = truncation. The rays must stay strictly
/// inside the resolvent's analyticity sector, i.e.
///   angle in (pi/2, pi/2 + theta)  with  theta = pi/2 - sector semiangle.
struct ContourParams {
  double angle;
  double radius;
  double truncation;
  int nodes;

  /// Design defaults: angle = pi/2 + 0.8*theta, radius 1/t, truncation far
  /// enough that the discarded ray tail is below 1e-20 relative.
  static ContourParams for_operator(const FormOperator& op, double t,
                                    int nodes_per_leg = 64) {
    const double alpha = op.sector().semiangle;
    const double analyticity = M_PI / 2 - alpha;
    ContourParams p;
    p.angle = M_PI / 2 + 0.8 * analyticity;
    p.radius = 1.0 / t;
    p.truncation = 46.0 / (t * std::abs(std::cos(p.angle)));
    p.nodes = nodes_per_leg;
    return p;
  }
};

struct ContourResult {
  Vector value;
  double quad_tolerance;  // difference against the half-node evaluation
};

namespace detail {

inline Vector contour_eval(const SemigroupEvaluator& ev, double t,
                           const Vector& f, const ContourParams& params,
                           int nodes) {
  const FormOperator& op = ev.source();
  Vector acc = Vector::Zero(f.size());

  // Rays: composite Gauss-Legendre on panels geometric in |lambda|. A single
  // long panel wastes nodes on the exponential decay.
  const int per_panel = 8;
  const int panels = std::max(1, nodes / per_panel);
  static const GaussLegendre ray_rule(per_panel);
  const double r = params.radius;
  const double rmax = std::max(params.truncation, 2.0 * r);
  const double ratio = std::pow(rmax / r, 1.0 / panels);
  for (int sign = -1; sign <= 1; sign += 2) {
    const Complex dir = std::polar(1.0, sign * params.angle);
    double left = r;
    for (int k = 0; k < panels; ++k) {
      const double right = (k == panels - 1) ? rmax : r * std::pow(ratio, k + 1);
      const double mid = 0.5 * (left + right), half = 0.5 * (right - left);
      for (std::size_t i = 0; i < ray_rule.nodes.size(); ++i) {
        const double rho = mid + half * ray_rule.nodes[i];
        const Complex lambda = rho * dir;
        const Vector rv = resolvent_apply(op, lambda, f);
        acc += double(sign) * (half * ray_rule.weights[i]) *
               std::exp(t * lambda) * dir * rv;
      }
      left = right;
    }
  }

  // Arc of radius r from -angle to +angle.
  const GaussLegendre arc_rule(nodes);
  for (std::size_t i = 0; i < arc_rule.nodes.size(); ++i) {
    const double phi = params.angle * arc_rule.nodes[i];
    const Complex lambda = std::polar(r, phi);
    const Vector rv = resolvent_apply(op, lambda, f);
    acc += (params.angle * arc_rule.weights[i]) * std::exp(t * lambda) *
           (Complex(0, 1) * lambda) * rv;
  }

  return acc / Complex(0.0, 2.0 * M_PI);
}

}  // namespace detail

/// Contour-integral evaluation of S_t f; the independent path against the
/// exponential evaluation. Reports the value together with an internal
/// quadrature tolerance (half-node comparison).
inline ContourResult semigroup_via_contour(const SemigroupEvaluator& ev, double t,
                                           const Vector& f,
                                           const ContourParams& params) {
  require(t > 0.0, ErrorCode::DimensionMismatch, "contour time must be positive");
  require(params.nodes >= 8, ErrorCode::DimensionMismatch,
          "contour quadrature needs at least 8 nodes per leg");
  const double alpha = ev.source().sector().semiangle;  // throws NotSectorial
  const double limit = M_PI / 2 + (M_PI / 2 - alpha);
  if (!(params.angle > M_PI / 2) || !(params.angle < limit))
    fail(ErrorCode::ContourOutsideSector,
         "ray angle must lie strictly inside (pi/2, pi - sector semiangle)");

  ContourResult out;
  out.value = detail::contour_eval(ev, t, f, params, params.nodes);
  const Vector coarse =
      detail::contour_eval(ev, t, f, params, std::max(8, params.nodes / 2));
  out.quad_tolerance = (out.value - coarse).norm();
  return out;
}

/// Residual of the Laplace-transform identity
///   (lambda I + A)^{-1} f = \int_0^infty e^{-lambda t} S_t f dt
/// on a truncated horizon [0, t_max] with geometric Gauss panels.
inline double laplace_transform_check(const SemigroupEvaluator& ev, Complex lambda,
                                      const Vector& f, double t_max,
                                      int quad_nodes) {
  require(lambda.real() > ev.bound_rate(), ErrorCode::DimensionMismatch,
          "need Re lambda > omega for the Laplace integral");
  QuadratureGrid grid = geometric_time_grid(t_max, quad_nodes, 1e-12);
  Vector integral = Vector::Zero(f.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    integral += grid.weights[i] * std::exp(-lambda * grid.points[i]) *
                ev.apply(grid.points[i], f);
  }
  const Vector direct = resolvent_apply(ev.source(), lambda, f);
  return (integral - direct).norm();
}

/// S_{t_k} f along a decreasing time sequence; returns the value at the
/// smallest time, the plain limit estimate for P f.
inline Vector strong_limit_projection(const SemigroupEvaluator& ev, const Vector& f,
                                      const std::vector<double>& t_sequence) {
  require(!t_sequence.empty(), ErrorCode::DimensionMismatch,
          "need at least one time in the sequence");
  double t_min = t_sequence.front();
  for (std::size_t i = 0; i < t_sequence.size(); ++i) {
    require(t_sequence[i] > 0.0, ErrorCode::DimensionMismatch,
            "limit times must be positive");
    if (i > 0)
      require(t_sequence[i] < t_sequence[i - 1], ErrorCode::DimensionMismatch,
              "limit times must decrease");
    t_min = t_sequence[i];
  }
  return ev.apply(t_min, f);
}

}  // namespace semilab

#endif  // SEMILAB_SEMIGROUP_HPP
