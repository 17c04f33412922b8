#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/QR>

#include "hodgelab/error.hpp"
#include "hodgelab/sphere_oracle.hpp"

using namespace hodgelab;
using namespace hodgelab::oracle;

namespace {

// Independent derivatives along great circles. The geodesic from p with unit
// velocity v is cos(t/r) p + r sin(t/r) v; tangent vectors are carried by
// parallel transport, which rotates the in-plane component with the velocity.
struct Geodesic {
  VectorXd p, v;
  double r;

  VectorXd point(double t) const { return std::cos(t / r) * p + r * std::sin(t / r) * v; }
  VectorXd velocity(double t) const { return -std::sin(t / r) / r * p + std::cos(t / r) * v; }
  VectorXd transport(const VectorXd& y, double t) const {
    const double a = y.dot(v);
    return a * velocity(t) + (y - a * v);
  }
};

using Bilinear = std::function<double(const VectorXd& x, const VectorXd& y, const VectorXd& z)>;

// Fourth-order central difference of t -> B(gamma(t), Y(t), Z(t)).
double transported_derivative(const Bilinear& B, const VectorXd& x, const VectorXd& X, const VectorXd& Y,
                              const VectorXd& Z, double r) {
  const Geodesic g{x, X, r};
  const double h = 1e-3 * r;
  auto at = [&](double t) { return B(g.point(t), g.transport(Y, t), g.transport(Z, t)); };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

// Hessian of an ambient polynomial restricted to the sphere: second derivative
// of f along the geodesic, polarized.
double geodesic_hessian(const HarmonicPoly& f, const VectorXd& x, const VectorXd& Y, const VectorXd& Z) {
  const double r = f.sphere().r;
  const VectorXd grad = f.ambient_gradient(x);
  const MatrixXd H = f.ambient_hessian();
  auto q = [&](const VectorXd& V) { return V.dot(H * V) - grad.dot(x) * V.squaredNorm() / (r * r); };
  return 0.25 * (q(Y + Z) - q(Y - Z));
}

MatrixXd random_orthogonal(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd M(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) M(i, j) = g(rng);
  Eigen::HouseholderQR<MatrixXd> qr(M);
  return qr.householderQ();
}

MatrixXd random_traceless(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd Q(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) Q(i, j) = Q(j, i) = g(rng);
  Q -= (Q.trace() / dim) * MatrixXd::Identity(dim, dim);
  return Q;
}

MatrixXd random_antisymmetric(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd A = MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < i; ++j) {
      A(i, j) = g(rng);
      A(j, i) = -A(i, j);
    }
  return A;
}

VectorXd random_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  return v;
}

}  // namespace

TEST_CASE("closed-form eigenvalues") {
  for (int n : {2, 3, 5}) {
    const double r = 1.0 / std::sqrt(0.7);
    const double alpha = 0.7;
    CHECK(laplace_eigenvalue(1, n, r) == doctest::Approx(n * alpha));
    CHECK(laplace_eigenvalue(2, n, r) == doctest::Approx(2 * (n + 1) * alpha));
    CHECK(laplace_eigenvalue(0, n, r) == 0.0);
  }
  CHECK(laplace_eigenvalue(1, 2, 1.0) == 2.0);
  CHECK(laplace_eigenvalue(2, 2, 1.0) == 6.0);
  const SphereContext s{4, 2.0};
  CHECK(s.alpha() * s.r * s.r == 1.0);
  CHECK(s.ricci() == doctest::Approx(0.75));
  CHECK_THROWS_AS(laplace_eigenvalue(1, 1, 1.0), Error);
}

TEST_CASE("covariant derivatives agree with great-circle differences") {
  std::mt19937_64 rng(7);
  for (int n : {2, 3, 5})
    for (double r : {1.0, 2.0}) {
      const SphereContext sphere{n, r};
      const HarmonicPoly fs[] = {HarmonicPoly::linear(random_vector(n + 1, rng), sphere),
                                 HarmonicPoly::quadratic(random_traceless(n + 1, rng), sphere)};
      for (const auto& f : fs)
        for (const auto& x : sample_points(sphere, 5, 11)) {
          const FunctionJet jet = covariant_derivatives(f, x);
          const MatrixXd& E = jet.frame;
          CHECK((E.transpose() * E - MatrixXd::Identity(n, n)).norm() < 1e-12);
          CHECK((E.transpose() * x).norm() < 1e-12);
          CHECK(jet.value == doctest::Approx(f.value(x)));
          const double scale = 1.0 + f.ambient_gradient(x).norm() + f.ambient_hessian().norm();
          for (int a = 0; a < n; ++a) {
            CHECK(std::abs(jet.df[a] - f.ambient_gradient(x).dot(E.col(a))) < 1e-12 * scale);
            for (int b = 0; b < n; ++b)
              CHECK(std::abs(jet.hess(a, b) - geodesic_hessian(f, x, E.col(a), E.col(b))) < 1e-12 * scale);
          }
          const Bilinear hess = [&](const VectorXd& p, const VectorXd& y, const VectorXd& z) {
            return geodesic_hessian(f, p, y, z);
          };
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int c = 0; c < n; ++c) {
                const double fd = transported_derivative(hess, x, E.col(a), E.col(b), E.col(c), r);
                CHECK(std::abs(jet.third(a, b, c) - fd) < 1e-8 * scale);
              }
        }
    }
}

TEST_CASE("rotation jets agree with great-circle differences") {
  std::mt19937_64 rng(9);
  for (int n : {2, 3})
    for (double r : {1.0, 2.0}) {
      const SphereContext sphere{n, r};
      const RotationForm w = RotationForm::make(random_antisymmetric(n + 1, rng), sphere);
      const Bilinear nabla = [&](const VectorXd&, const VectorXd& y, const VectorXd& z) {
        return z.dot(w.A * y);
      };
      for (const auto& x : sample_points(sphere, 5, 13)) {
        const OneFormJet jet = oneform_jet(OracleForm(w), x);
        const MatrixXd& E = jet.frame;
        for (int a = 0; a < n; ++a) {
          CHECK(std::abs(jet.omega[a] - (w.A * x).dot(E.col(a))) < 1e-12);
          for (int b = 0; b < n; ++b) {
            const Geodesic g{x, E.col(a), r};
            const double h = 1e-3 * r;
            auto at = [&](double t) { return (w.A * g.point(t)).dot(g.transport(E.col(b), t)); };
            const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
            CHECK(std::abs(jet.nabla(a, b) - fd) < 1e-9);
            for (int c = 0; c < n; ++c)
              CHECK(std::abs(jet.nabla2(a, b, c) -
                             transported_derivative(nabla, x, E.col(a), E.col(b), E.col(c), r)) < 1e-9);
          }
        }
      }
    }
}

TEST_CASE("Weitzenbock formula against the Hodge split") {
  std::mt19937_64 rng(17);
  for (int n : {2, 3, 5})
    for (double r : {1.0, 2.0}) {
      const SphereContext sphere{n, r};
      const OracleForm forms[] = {HarmonicPoly::linear(random_vector(n + 1, rng), sphere),
                                  HarmonicPoly::quadratic(random_traceless(n + 1, rng), sphere),
                                  RotationForm::make(random_antisymmetric(n + 1, rng), sphere)};
      for (const auto& form : forms)
        for (const auto& x : sample_points(sphere, 10, 19)) {
          const OneFormJet jet = oneform_jet(form, x);
          const LaplacianSplit split = hodge_laplacian(form, x);
          VectorXd rough = VectorXd::Zero(n);
          for (int c = 0; c < n; ++c)
            for (int a = 0; a < n; ++a) rough[c] -= jet.nabla2(a, a, c);
          const VectorXd weitzenbock = rough + sphere.ricci() * jet.omega;
          const double scale = sphere.alpha() * (1.0 + jet.omega.norm());
          CHECK((split.laplacian - weitzenbock).norm() < 1e-11 * scale);
          CHECK((split.laplacian - split.dd_star - split.d_star_d).norm() < 1e-11 * scale);
        }
    }
}

TEST_CASE("hessian examples") {
  const SphereContext unit{2, 1.0};
  const HarmonicPoly z = HarmonicPoly::linear(Eigen::Vector3d::UnitZ(), unit);
  for (const auto& x : sample_points(unit, 100, 3)) {
    const FunctionJet jet = covariant_derivatives(z, x);
    CHECK((jet.hess + jet.value * MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(jet.hess.trace() == doctest::Approx(-2.0 * jet.value));
  }
  for (int n : {2, 3, 5}) {
    const SphereContext s{n, 1.0};
    for (const auto& f : quadratic_basis(s))
      for (const auto& x : sample_points(s, 100, 5)) {
        const FunctionJet jet = covariant_derivatives(f, x);
        CHECK(std::abs(-jet.hess.trace() - 2.0 * (n + 1) * jet.value) < 1e-12);
      }
  }
}

TEST_CASE("derivative tensors are tangential and symmetric") {
  std::mt19937_64 rng(23);
  for (int n : {2, 3, 5}) {
    const SphereContext s{n, 1.5};
    const HarmonicPoly f = HarmonicPoly::quadratic(random_traceless(n + 1, rng), s);
    for (const auto& x : sample_points(s, 20, 29)) {
      const FunctionJet jet = covariant_derivatives(f, x);
      CHECK((jet.hess - jet.hess.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) CHECK(std::abs(jet.third(a, b, c) - jet.third(a, c, b)) < 1e-10);
      // Frame components are tangential by construction; the embedding must be too.
      CHECK((jet.frame.transpose() * x).norm() < 1e-10);
      const OneFormJet w = oneform_jet(OracleForm(f), x);
      CHECK(std::abs((jet.frame * w.omega).dot(x)) < 1e-10);
      CHECK(w.normal.dot(x) == doctest::Approx(x.norm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("trace identity for every degree") {
  for (int n : {2, 3, 5})
    for (double r : {1.0, 2.0}) {
      const SphereContext s{n, r};
      for (const auto& f : linear_basis(s))
        for (const auto& x : sample_points(s, 20, 31)) {
          const FunctionJet jet = covariant_derivatives(f, x);
          CHECK(std::abs(jet.hess.trace() + n * s.alpha() * jet.value) < 1e-12);
        }
    }
}

TEST_CASE("Obata residual") {
  for (double r : {1.0, 2.0}) {
    const SphereContext s{2, r};
    for (const auto& f : linear_basis(s))
      for (const auto& x : sample_points(s, 100, 37)) CHECK(obata_residual(f, x) < 1e-12);
    const auto quad = quadratic_basis(s);
    CHECK_THROWS_WITH_AS(obata_residual(quad[0], sample_points(s, 1, 1)[0]),
                         "Obata residual defined for first-eigenvalue functions", Error);
  }
}

TEST_CASE("Tanno residual") {
  const SphereContext unit{2, 1.0};
  const auto pts = sample_points(unit, 100, 41);
  for (const auto& f : quadratic_basis(unit))
    for (const auto& x : pts) {
      CHECK(tanno_residual(f, x, 1.0) < 1e-12);
      CHECK(tanno_residual(f, x) < 1e-12);
    }
  double min_k2 = 1e300;
  for (const auto& f : quadratic_basis(unit))
    for (const auto& x : pts) {
      if (covariant_derivatives(f, x).df.norm() < 1e-3) continue;
      min_k2 = std::min(min_k2, tanno_residual(f, x, 2.0));
      // Linear in k.
      const double r1 = tanno_residual(f, x, 1.5), r2 = tanno_residual(f, x, 2.0);
      CHECK(r2 == doctest::Approx(2.0 * r1).epsilon(1e-9));
    }
  CHECK(min_k2 > 0.5);

  // First eigenfunctions: nabla^3 f = -alpha df (x) g in the differentiation
  // slot, which leaves 2 df(Z) g(X, Y) + df(Y) g(X, Z) of the equation.
  for (int n : {2, 3, 5}) {
    const SphereContext s{n, 1.0};
    for (const auto& f : linear_basis(s)) {
      double worst = 0.0;
      for (const auto& x : sample_points(s, 100, 43)) worst = std::max(worst, tanno_residual(f, x));
      CHECK(worst > 1.0);
    }
  }
}

TEST_CASE("generalized Tanno residual") {
  for (int n : {2, 3, 5}) {
    const SphereContext s{n, 1.0};
    const auto pts = sample_points(s, 100, 47);
    for (const auto& f : quadratic_basis(s))
      for (const auto& x : pts) CHECK(generalized_tanno_residual(f, x).printed < 1e-12);
    double opposite = 0.0;
    for (const auto& x : pts) opposite = std::max(opposite, generalized_tanno_residual(quadratic_basis(s)[0], x).opposite_sign);
    CHECK(opposite > 0.1);
    for (const auto& x : pts) {
      const auto g = generalized_tanno_residual(HarmonicPoly::constant(3.0, s), x);
      CHECK(g.printed == 0.0);
      CHECK(g.opposite_sign == 0.0);
    }
    // Both signs are reported for first eigenfunctions.
    const auto g1 = generalized_tanno_residual(linear_basis(s)[0], pts[0]);
    CHECK(std::isfinite(g1.printed));
    CHECK(std::isfinite(g1.opposite_sign));
  }
}

TEST_CASE("identity residual examples") {
  for (int n : {2, 3, 5}) {
    const SphereContext s{n, 1.0};
    const auto x = sample_points(s, 1, 53)[0];
    const OracleForm lin = linear_basis(s)[0];
    const OracleForm quad = quadratic_basis(s)[0];
    const OracleForm rot = rotation_basis(s)[0];
    CHECK(yano_identity_residual(quad, x) < 1e-12);
    CHECK(yano_identity_residual(rot, x) < 1e-12);
    const double expected_yano = std::abs(n - (2.0 * (n - 1) + 2.0 * n / (n + 1)));
    CHECK(yano_identity_residual(lin, x) == doctest::Approx(expected_yano).epsilon(1e-10));
    CHECK(lichnerowicz_identity_residual(lin, x) < 1e-12);
    CHECK(lichnerowicz_identity_residual(rot, x) < 1e-12);
    const double expected_lich = std::abs(2.0 * (n + 1) - (2.0 * (n - 1) - (1.0 - 2.0 / n) * 2.0 * (n + 1)));
    CHECK(lichnerowicz_identity_residual(quad, x) == doctest::Approx(expected_lich).epsilon(1e-10));
    CHECK(projective_defining_residual(quad, x) < 1e-12);
    CHECK(projective_defining_residual(rot, x) < 1e-12);
    CHECK(conformal_defining_residual(lin, x) < 1e-12);
    CHECK(conformal_defining_residual(rot, x) < 1e-12);
  }
}

TEST_CASE("residuals are rotation invariant") {
  std::mt19937_64 rng(59);
  for (int n : {2, 3, 5}) {
    const SphereContext s{n, 2.0};
    const MatrixXd R = random_orthogonal(n + 1, rng);
    const HarmonicPoly f = HarmonicPoly::quadratic(random_traceless(n + 1, rng), s);
    const HarmonicPoly l = HarmonicPoly::linear(random_vector(n + 1, rng), s);
    for (const auto& x : sample_points(s, 10, 61)) {
      const VectorXd y = R * x;
      CHECK(std::abs(tanno_residual(f, x, 0.5) - tanno_residual(f.rotated(R), y, 0.5)) < 1e-12);
      CHECK(std::abs(yano_identity_residual(OracleForm(l), x) -
                     yano_identity_residual(OracleForm(l.rotated(R)), y)) < 1e-12);
      CHECK(std::abs(lichnerowicz_identity_residual(OracleForm(f), x) -
                     lichnerowicz_identity_residual(OracleForm(f.rotated(R)), y)) < 1e-12);
      CHECK(std::abs(f.value(x) - f.rotated(R).value(y)) < 1e-12);
    }
  }
}

TEST_CASE("theorem bounds") {
  const BoundSet c = theorem_bounds(2, 1.0, 1.0, BoundMode::Conformal);
  CHECK(c.lower == doctest::Approx(2.0));
  CHECK(c.upper_printed == doctest::Approx(2.0));
  CHECK(c.upper_rederived == doctest::Approx(2.0));
  CHECK(c.consistent_printed);

  const BoundSet p = theorem_bounds(2, 1.0, 1.0, BoundMode::Projective);
  CHECK(p.lower == doctest::Approx(2.0));
  CHECK(p.upper_printed == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(p.consistent_printed);
  CHECK(p.upper_rederived == doctest::Approx(6.0));
  CHECK(p.consistent_rederived);

  const BoundSet p3 = theorem_bounds(3, 2.0, 2.0, BoundMode::Projective);
  CHECK(p3.lower == doctest::Approx(4.0));
  CHECK(p3.upper_printed == doctest::Approx(2.0));
  CHECK(p3.upper_rederived == doctest::Approx(8.0));

  CHECK_THROWS_AS(theorem_bounds(2, 2.0, 1.0, BoundMode::Conformal), Error);
}

TEST_CASE("argument checks") {
  const SphereContext s{2, 1.0};
  const auto f = linear_basis(s)[0];
  Eigen::VectorXd off = Eigen::Vector3d(1.0, 1.0, 0.0);
  CHECK_THROWS_AS(covariant_derivatives(f, off), Error);
  CHECK_THROWS_AS(tanno_residual(f, off), Error);
  CHECK_THROWS_AS(HarmonicPoly::quadratic(MatrixXd::Identity(3, 3), s), Error);
  CHECK_THROWS_AS(HarmonicPoly::linear(Eigen::VectorXd::Ones(2), s), Error);
  CHECK_THROWS_AS(RotationForm::make(MatrixXd::Identity(3, 3), s), Error);
  CHECK_THROWS_AS((SphereContext{1, 1.0}.validate()), Error);
}

TEST_CASE("sample points and bases") {
  for (int n : {2, 3, 5}) {
    const SphereContext s{n, 2.0};
    const auto pts = sample_points(s, 100, 1);
    CHECK(pts.size() == 100);
    for (const auto& p : pts) CHECK(p.norm() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sample_points(s, 100, 1)[42] == pts[42]);
    CHECK(linear_basis(s).size() == static_cast<std::size_t>(n + 1));
    CHECK(quadratic_basis(s).size() == static_cast<std::size_t>((n + 1) * (n + 2) / 2 - 1));
    CHECK(rotation_basis(s).size() == static_cast<std::size_t>(n * (n + 1) / 2));
  }
}
