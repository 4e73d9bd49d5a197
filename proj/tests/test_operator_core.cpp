#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "semilab/operator_core.hpp"
#include "oracles.hpp"

using namespace semilab;
using Catch::Approx;

namespace {

FormOperator scalar_op(double k) {
  Matrix b(1, 1), s(1, 1);
  b << 1.0;
  s << k;
  return assemble_form_operator(SubspaceBasis(b), s);
}

FormOperator full_space_op(const Matrix& k) {
  return assemble_form_operator(
      SubspaceBasis(Matrix::Identity(k.rows(), k.rows())), k);
}

}  // namespace

TEST_CASE("assemble_form_operator: scalar case") {
  FormOperator op = scalar_op(2.0);
  REQUIRE(op.gram()(0, 0).real() == Approx(1.0));
  REQUIRE(op.symmetric());
}

TEST_CASE("assemble_form_operator: full-space orthonormal basis") {
  auto gen = oracles::rng(11);
  Matrix k = oracles::random_hermitian(4, gen);
  FormOperator op = full_space_op(k);
  REQUIRE(op.symmetric());
  REQUIRE((op.gram() - Matrix::Identity(4, 4)).norm() < 1e-13);
}

TEST_CASE("assemble_form_operator: gram equals dense product") {
  auto gen = oracles::rng(12);
  Matrix b = oracles::random_matrix(4, 2, gen);
  Matrix k(2, 2);
  k << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(1, 0);
  FormOperator op = assemble_form_operator(SubspaceBasis(b), k);
  Matrix expected = b.adjoint() * b;
  REQUIRE((op.gram() - expected).norm() < 1e-12 * expected.norm());
  REQUIRE(op.symmetric());
}

TEST_CASE("assemble_form_operator: error paths") {
  Matrix b(3, 2);
  b.col(0) << 1.0, 0.0, 0.0;
  b.col(1) << 1.0, 1e-9, 0.0;  // numerically dependent columns
  Matrix k = Matrix::Identity(2, 2);
  REQUIRE_THROWS_AS(assemble_form_operator(SubspaceBasis(b), k), Error);
  try {
    assemble_form_operator(SubspaceBasis(b), k);
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::SingularGram);
  }

  Matrix good = Matrix::Identity(3, 2);
  Matrix wrong = Matrix::Identity(3, 3);
  try {
    assemble_form_operator(SubspaceBasis(good), wrong);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("resolvent_apply: scalar 1/(1+2)") {
  FormOperator op = scalar_op(2.0);
  Vector f(1);
  f << 1.0;
  Vector u = resolvent_apply(op, Complex(1.0, 0.0), f);
  REQUIRE(std::abs(u(0) - Complex(1.0 / 3.0, 0.0)) < 1e-14);
}

TEST_CASE("resolvent_apply: block-swap operator at n=2 matches 1/2(I-V)") {
  // U swaps coordinate blocks {1,2} and {3,4} of C^6; V = (1-1/n) U;
  // A = (I+V)(I-V)^{-1} = [(1+v^2) I + 2V] / (1-v^2) since V^2 = v^2 I.
  const int n = 2, N = 6;
  const double v = 1.0 - 1.0 / n;
  Matrix u = Matrix::Zero(N, N);
  for (int i = 0; i < n; ++i) {
    u(i, n + i) = 1.0;
    u(n + i, i) = 1.0;
  }
  for (int i = 2 * n; i < N; ++i) u(i, i) = 1.0;
  Matrix a = ((1 + v * v) * Matrix::Identity(N, N) + 2 * v * u) / (1 - v * v);

  FormOperator op = full_space_op(a);
  Vector e1 = Vector::Zero(N);
  e1(0) = 1.0;
  Vector got = resolvent_apply(op, Complex(1.0, 0.0), e1);
  Vector expected = Vector::Zero(N);
  expected(0) = 0.5;
  expected(2) = -0.25;
  REQUIRE((got - expected).norm() < 1e-12);
}

TEST_CASE("resolvent_apply: random Hermitian matches dense LU oracle") {
  auto gen = oracles::rng(21);
  Matrix k = oracles::random_hermitian(5, gen);
  FormOperator op = full_space_op(k);
  Vector f = oracles::random_vector(5, gen);
  Complex lambda(2.0, 1.0);
  Vector got = resolvent_apply(op, lambda, f);
  Vector expected = oracles::dense_lu_resolvent(k, lambda, f);
  REQUIRE((got - expected).norm() < 1e-10 * expected.norm());
}

TEST_CASE("resolvent_apply: singular pencil reports SingularSystem") {
  auto gen = oracles::rng(22);
  Matrix k = oracles::random_hermitian_psd(4, gen, 0.5);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  const double mu = es.eigenvalues()(0);
  FormOperator op = full_space_op(k);
  Vector f = oracles::random_vector(4, gen);
  try {
    resolvent_apply(op, Complex(-mu, 0.0), f);  // lambda at -spectrum
    FAIL("expected SingularSystem");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::SingularSystem);
  }
}

TEST_CASE("resolvent identity on probe basis") {
  auto gen = oracles::rng(23);
  Matrix k = oracles::random_hermitian_psd(6, gen, 0.3);
  FormOperator op = full_space_op(k);
  const Complex l1(1.0, 0.5), l2(3.0, -1.0);
  ResolventOperator r1(op, l1), r2(op, l2);
  for (int p = 0; p < 6; ++p) {
    Vector f = Vector::Zero(6);
    f(p) = 1.0;
    Vector lhs = r1.apply(f) - r2.apply(f) + (l1 - l2) * r1.apply(r2.apply(f));
    REQUIRE(lhs.norm() < 1e-10);
  }
}

TEST_CASE("self-adjoint contraction bound") {
  auto gen = oracles::rng(24);
  Matrix k = oracles::random_hermitian_psd(5, gen);
  FormOperator op = full_space_op(k);
  for (double lambda : {0.5, 1.0, 7.0}) {
    for (int p = 0; p < 3; ++p) {
      Vector f = oracles::random_vector(5, gen);
      Vector u = resolvent_apply(op, Complex(lambda, 0.0), f);
      REQUIRE(lambda * u.norm() <= f.norm() * (1 + 1e-12));
    }
  }
}

TEST_CASE("real_part_operator: fixed point and algebraic identity") {
  Matrix k1(2, 2);
  k1 << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(1, 0);
  Matrix b = Matrix::Identity(2, 2);
  FormOperator op1 = assemble_form_operator(SubspaceBasis(b), k1);
  FormOperator re1 = real_part_operator(op1);
  REQUIRE((re1.stiffness() - k1).norm() < 1e-14);

  Matrix k2(2, 2);
  k2 << 1.0, 1.0, 0.0, 1.0;
  FormOperator op2 = assemble_form_operator(SubspaceBasis(b), k2);
  FormOperator re2 = real_part_operator(op2);
  Matrix expected(2, 2);
  expected << 1.0, 0.5, 0.5, 1.0;
  REQUIRE((re2.stiffness() - expected).norm() < 1e-14);
  REQUIRE(re2.symmetric());
}

TEST_CASE("real_part_operator: quadratic form equals Re of original") {
  auto gen = oracles::rng(25);
  Matrix k = oracles::random_matrix(6, 6, gen);
  FormOperator op = full_space_op(k);
  FormOperator re = real_part_operator(op);
  for (int p = 0; p < 100; ++p) {
    Vector u = oracles::random_vector(6, gen);
    Complex a = Complex(u.adjoint() * (k * u));
    Complex r = Complex(u.adjoint() * (re.stiffness() * u));
    REQUIRE(std::abs(r.real() - a.real()) < 1e-12 * std::abs(a));
    REQUIRE(std::abs(r.imag()) < 1e-12 * std::abs(a));
  }
}

TEST_CASE("estimate_sector: Hermitian positive-definite") {
  auto gen = oracles::rng(26);
  Matrix k = oracles::random_hermitian_psd(4, gen, 0.2);
  FormOperator op = full_space_op(k);
  SectorEstimate s = estimate_sector(op);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  REQUIRE(s.semiangle <= 1e-8);
  REQUIRE(s.vertex == Approx(es.eigenvalues()(0)).margin(1e-12));
}

TEST_CASE("estimate_sector: rotation block has vertex 0, semiangle pi/4") {
  Matrix k(2, 2);
  k << 1.0, 1.0, -1.0, 1.0;
  FormOperator op = full_space_op(k);
  SectorEstimate s = estimate_sector(op);
  REQUIRE(s.vertex == Approx(0.0).margin(1e-12));
  REQUIRE(s.semiangle == Approx(M_PI / 4).margin(1e-10));
  // brute-force scan of the numerical range stays below the reported slope
  double scanned = oracles::sector_slope_scan(k, s.vertex, 77, 50000);
  REQUIRE(scanned <= std::tan(s.semiangle) + 1e-9);
}

TEST_CASE("estimate_sector: pure skew form is not sectorial") {
  Matrix k(2, 2);
  k << 0.0, 1.0, -1.0, 0.0;
  FormOperator op = full_space_op(k);
  try {
    estimate_sector(op);
    FAIL("expected NotSectorial");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::NotSectorial);
  }
}

TEST_CASE("orthogonal_projection: fixes range, kills orthogonal complement") {
  Matrix b(4, 2);
  b.setZero();
  b(0, 0) = 1.0;
  b(1, 1) = 1.0;
  FormOperator op = assemble_form_operator(SubspaceBasis(b), Matrix::Identity(2, 2));

  Vector in_range(4);
  in_range << 1.0, Complex(0, 2), 0.0, 0.0;
  REQUIRE((orthogonal_projection(op, in_range) - in_range).norm() < 1e-14);

  Vector perp(4);
  perp << 0.0, 0.0, 3.0, Complex(0, -1);
  REQUIRE(orthogonal_projection(op, perp).norm() < 1e-14);
}

TEST_CASE("orthogonal_projection: matches QR projector oracle") {
  auto gen = oracles::rng(27);
  Matrix raw = oracles::random_matrix(4, 2, gen);
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix b = qr.householderQ() * Matrix::Identity(4, 2);
  FormOperator op = assemble_form_operator(SubspaceBasis(b), Matrix::Identity(2, 2));
  Vector f = oracles::random_vector(4, gen);
  Vector got = orthogonal_projection(op, f);
  Vector expected = oracles::qr_projection(raw, f);
  REQUIRE((got - expected).norm() < 1e-12);
}

TEST_CASE("projection algebra: P^2 = P and P* = P on probes") {
  auto gen = oracles::rng(28);
  Matrix b = oracles::random_matrix(6, 3, gen);
  FormOperator op = assemble_form_operator(SubspaceBasis(b), Matrix::Identity(3, 3));
  for (int p = 0; p < 6; ++p) {
    Vector f = Vector::Zero(6);
    f(p) = 1.0;
    Vector pf = orthogonal_projection(op, f);
    REQUIRE((orthogonal_projection(op, pf) - pf).norm() < 1e-12);
  }
  // self-adjointness: (Pf, g) = (f, Pg) on probe pairs
  Vector f = oracles::random_vector(6, gen), g = oracles::random_vector(6, gen);
  Complex lhs = orthogonal_projection(op, f).dot(g);
  Complex rhs = f.dot(orthogonal_projection(op, g));
  REQUIRE(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("hille_yosida_check: scalar contraction passes") {
  FormOperator op = scalar_op(2.0);
  auto report = hille_yosida_check(op, 0.0, 1.0, 4, {0.5, 1.0, 4.0, 16.0});
  REQUIRE(report.within_bound);
  REQUIRE(report.max_norm <= 1.0 + 1e-8);
}

TEST_CASE("hille_yosida_check: self-adjoint positive passes with M=1") {
  auto gen = oracles::rng(29);
  Matrix k = oracles::random_hermitian_psd(5, gen, 0.1);
  FormOperator op = full_space_op(k);
  auto report = hille_yosida_check(op, 0.0, 1.0, 3, {0.25, 1.0, 10.0});
  REQUIRE(report.within_bound);
  // eigendecomposition oracle: exact norm is (lambda/(lambda+mu_min))^k
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  const double mu_min = es.eigenvalues()(0);
  for (const auto& row : report.rows) {
    const double exact = std::pow(row.lambda / (row.lambda + mu_min), row.power);
    REQUIRE(row.norm == Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("hille_yosida_check: negative vertex fails the bound") {
  FormOperator op = scalar_op(-1.0);  // scalar counter-case, omega = 0
  auto report = hille_yosida_check(op, 0.0, 1.0, 2, {0.5, 2.0});
  REQUIRE_FALSE(report.within_bound);
}
