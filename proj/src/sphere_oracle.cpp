#include "hodgelab/sphere_oracle.hpp"

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "hodgelab/error.hpp"

namespace hodgelab::oracle {

namespace {

constexpr double kOnSphereTol = 1e-10;

void check_point(const SphereContext& sphere, const VectorXd& x) {
  require(x.size() == sphere.n + 1, "point dimension does not match the sphere");
  require(std::abs(x.norm() - sphere.r) <= kOnSphereTol * std::max(1.0, sphere.r),
          "point is not on the sphere");
}

const SphereContext& sphere_of(const OracleForm& form) {
  return std::visit(
      [](const auto& w) -> const SphereContext& {
        if constexpr (std::is_same_v<std::decay_t<decltype(w)>, HarmonicPoly>)
          return w.sphere();
        else
          return w.sphere;
      },
      form);
}

// Ambient affine 1-form W(x) = J x + w0 restricted to the sphere.
struct AmbientForm {
  VectorXd value;  // W(x)
  MatrixXd jacobian;
};

AmbientForm ambient_form(const OracleForm& form, const VectorXd& x) {
  if (const auto* f = std::get_if<HarmonicPoly>(&form))
    return {f->ambient_gradient(x), f->ambient_hessian()};
  const auto& rot = std::get<RotationForm>(form);
  return {rot.A * x, rot.A};
}

double norm_or_zero(double numerator, double denominator) {
  if (numerator == 0.0) return 0.0;
  return numerator / std::max(denominator, 1e-300);
}

}  // namespace

void SphereContext::validate() const {
  require(n >= 2, "sphere dimension must be at least 2");
  require(r > 0.0 && std::isfinite(r), "sphere radius must be positive");
}

HarmonicPoly HarmonicPoly::constant(double c, const SphereContext& sphere) {
  sphere.validate();
  return {0, c, VectorXd::Zero(sphere.n + 1), MatrixXd::Zero(sphere.n + 1, sphere.n + 1), sphere};
}

HarmonicPoly HarmonicPoly::linear(const VectorXd& d, const SphereContext& sphere) {
  sphere.validate();
  require(d.size() == sphere.n + 1, "linear coefficients must have n + 1 entries");
  return {1, 0.0, d, MatrixXd::Zero(sphere.n + 1, sphere.n + 1), sphere};
}

HarmonicPoly HarmonicPoly::quadratic(const MatrixXd& Q, const SphereContext& sphere) {
  sphere.validate();
  require(Q.rows() == sphere.n + 1 && Q.cols() == sphere.n + 1,
          "quadratic coefficients must be (n + 1) x (n + 1)");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          "quadratic coefficients must be symmetric");
  require(std::abs(Q.trace()) <= 1e-12 * scale, "quadratic coefficients must be traceless");
  return {2, 0.0, VectorXd::Zero(sphere.n + 1), 0.5 * (Q + Q.transpose()), sphere};
}

double HarmonicPoly::value(const VectorXd& x) const {
  switch (degree_) {
    case 0: return c_;
    case 1: return d_.dot(x);
    default: return x.dot(Q_ * x);
  }
}

VectorXd HarmonicPoly::ambient_gradient(const VectorXd& x) const {
  switch (degree_) {
    case 0: return VectorXd::Zero(x.size());
    case 1: return d_;
    default: return 2.0 * Q_ * x;
  }
}

MatrixXd HarmonicPoly::ambient_hessian() const {
  return degree_ == 2 ? MatrixXd(2.0 * Q_) : MatrixXd::Zero(sphere_.n + 1, sphere_.n + 1);
}

double HarmonicPoly::eigenvalue() const { return laplace_eigenvalue(degree_, sphere_.n, sphere_.r); }

HarmonicPoly HarmonicPoly::rotated(const MatrixXd& R) const {
  // f(R^T x): d -> R d, Q -> R Q R^T
  return {degree_, c_, R * d_, R * Q_ * R.transpose(), sphere_};
}

RotationForm RotationForm::make(const MatrixXd& A, const SphereContext& sphere) {
  sphere.validate();
  require(A.rows() == sphere.n + 1 && A.cols() == sphere.n + 1,
          "rotation generator must be (n + 1) x (n + 1)");
  require((A + A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()),
          "rotation generator must be antisymmetric");
  return {0.5 * (A - A.transpose()), sphere};
}

double laplace_eigenvalue(int degree, int n, double r) {
  require(degree >= 0 && n >= 2 && r > 0.0, "invalid spherical harmonic parameters");
  return degree * (degree + n - 1) / (r * r);
}

MatrixXd tangent_frame(const VectorXd& x) {
  const Eigen::Index N = x.size();
  Eigen::HouseholderQR<MatrixXd> qr(x.normalized());
  const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(N, N);
  return Q.rightCols(N - 1);
}

OneFormJet oneform_jet(const OracleForm& form, const VectorXd& x) {
  const SphereContext& sphere = sphere_of(form);
  check_point(sphere, x);
  const int n = sphere.n;
  const double r = sphere.r;
  const AmbientForm w = ambient_form(form, x);

  OneFormJet jet;
  jet.frame = tangent_frame(x);
  jet.normal = x / r;
  const MatrixXd& E = jet.frame;
  const VectorXd& nu = jet.normal;
  const double w_normal = w.value.dot(nu);

  jet.omega = E.transpose() * w.value;
  // (nabla_Y w)(Z) = Z^T J Y + w . II(Y, Z), II(Y, Z) = -(Y . Z / r) nu
  jet.nabla = E.transpose() * w.jacobian.transpose() * E - (w_normal / r) * MatrixXd::Identity(n, n);

  // Differentiate the ambient extension of nabla w and correct both slots
  // with the second fundamental form.
  const VectorXd J_nu = E.transpose() * (w.jacobian * nu);             // (J nu) . e_c
  const VectorXd nu_J = E.transpose() * (w.jacobian.transpose() * nu);  // nu^T J e_b
  const VectorXd normal_rate =
      (E.transpose() * (w.jacobian.transpose() * nu) + E.transpose() * w.value / r) / r;
  jet.nabla2 = Tensor3(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = 0.0;
        if (b == c) v -= normal_rate[a];
        if (a == b) v -= J_nu[c] / r;
        if (a == c) v -= nu_J[b] / r;
        jet.nabla2(a, b, c) = v;
      }
  return jet;
}

FunctionJet covariant_derivatives(const HarmonicPoly& f, const VectorXd& x) {
  OneFormJet jet = oneform_jet(f, x);
  return {std::move(jet.frame), f.value(x), std::move(jet.omega), std::move(jet.nabla),
          std::move(jet.nabla2)};
}

MatrixXd ambient_hessian_form(const HarmonicPoly& f, const VectorXd& x) {
  check_point(f.sphere(), x);
  const double r = f.sphere().r;
  const double w_normal = f.ambient_gradient(x).dot(x / r);
  return f.ambient_hessian() - (w_normal / r) * MatrixXd::Identity(x.size(), x.size());
}

double obata_residual(const HarmonicPoly& f, const VectorXd& x) {
  require(f.degree() == 1, "Obata residual defined for first-eigenvalue functions");
  const FunctionJet jet = covariant_derivatives(f, x);
  const int n = f.sphere().n;
  const double mu = f.eigenvalue();
  const MatrixXd R = jet.hess + (mu / n) * jet.value * MatrixXd::Identity(n, n);
  return norm_or_zero(R.norm(), std::max(std::abs(jet.value), jet.df.norm()));
}

namespace {

// Frobenius norm of T(a,b,c) + 2 p_a g_bc + p_b g_ac + p_c g_ab; frame independent.
double third_order_defect(const Tensor3& third, const VectorXd& p) {
  const int n = third.dim();
  double sum = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        double v = third(a, b, c);
        if (b == c) v += 2.0 * p[a];
        if (a == c) v += p[b];
        if (a == b) v += p[c];
        sum += v * v;
      }
  return std::sqrt(sum);
}

VectorXd gradient_of_laplacian(const Tensor3& third) {
  const int n = third.dim();
  VectorXd g = VectorXd::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g[a] -= third(a, b, b);
  return g;
}

}  // namespace

double tanno_residual(const HarmonicPoly& f, const VectorXd& x, double k) {
  const FunctionJet jet = covariant_derivatives(f, x);
  const double defect = third_order_defect(jet.third, k * jet.df);
  return norm_or_zero(defect, f.sphere().alpha() * jet.df.norm());
}

double tanno_residual(const HarmonicPoly& f, const VectorXd& x) {
  return tanno_residual(f, x, f.sphere().alpha());
}

GeneralizedTannoResidual generalized_tanno_residual(const HarmonicPoly& f, const VectorXd& x) {
  const FunctionJet jet = covariant_derivatives(f, x);
  const int n = f.sphere().n;
  const VectorXd phi = gradient_of_laplacian(jet.third) / (2.0 * (n + 1));
  const double scale = f.sphere().alpha() * jet.df.norm();
  return {norm_or_zero(third_order_defect(jet.third, phi), scale),
          norm_or_zero(third_order_defect(jet.third, -phi), scale)};
}

LaplacianSplit hodge_laplacian(const OracleForm& form, const VectorXd& x) {
  const OneFormJet jet = oneform_jet(form, x);
  const int n = static_cast<int>(jet.omega.size());
  LaplacianSplit out;
  out.omega = jet.omega;
  out.codifferential = -jet.nabla.trace();
  out.dd_star = VectorXd::Zero(n);
  out.d_star_d = VectorXd::Zero(n);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a) {
      out.dd_star[c] -= jet.nabla2(c, a, a);
      out.d_star_d[c] -= jet.nabla2(a, a, c) - jet.nabla2(a, c, a);
    }
  out.laplacian = out.dd_star + out.d_star_d;
  return out;
}

double yano_identity_residual(const OracleForm& form, const VectorXd& x) {
  const SphereContext& sphere = sphere_of(form);
  const LaplacianSplit s = hodge_laplacian(form, x);
  const VectorXd defect =
      s.laplacian - 2.0 * sphere.ricci() * s.omega - (2.0 / (sphere.n + 1)) * s.dd_star;
  return norm_or_zero(defect.norm(), sphere.alpha() * s.omega.norm());
}

double lichnerowicz_identity_residual(const OracleForm& form, const VectorXd& x) {
  const SphereContext& sphere = sphere_of(form);
  const LaplacianSplit s = hodge_laplacian(form, x);
  const VectorXd defect =
      s.laplacian - 2.0 * sphere.ricci() * s.omega + (1.0 - 2.0 / sphere.n) * s.dd_star;
  return norm_or_zero(defect.norm(), sphere.alpha() * s.omega.norm());
}

double projective_defining_residual(const OracleForm& form, const VectorXd& x) {
  const SphereContext& sphere = sphere_of(form);
  const OneFormJet jet = oneform_jet(form, x);
  const int n = sphere.n;
  // phi = -(n + 1)^-1 d d* w
  VectorXd phi = VectorXd::Zero(n);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a) phi[c] += jet.nabla2(c, a, a) / (n + 1);
  double sum = 0.0;
  // (nabla_Z Phi)(X, Y) - 2 phi(Z) g(X, Y) - phi(X) g(Z, Y) - phi(Y) g(X, Z)
  for (int z = 0; z < n; ++z)
    for (int xx = 0; xx < n; ++xx)
      for (int y = 0; y < n; ++y) {
        double v = jet.nabla2(z, xx, y) + jet.nabla2(z, y, xx);
        if (xx == y) v -= 2.0 * phi[z];
        if (z == y) v -= phi[xx];
        if (xx == z) v -= phi[y];
        sum += v * v;
      }
  return norm_or_zero(std::sqrt(sum), sphere.alpha() * jet.omega.norm());
}

double conformal_defining_residual(const OracleForm& form, const VectorXd& x) {
  const SphereContext& sphere = sphere_of(form);
  const OneFormJet jet = oneform_jet(form, x);
  const int n = sphere.n;
  const double codiff = -jet.nabla.trace();
  const MatrixXd R =
      jet.nabla + jet.nabla.transpose() + (2.0 / n) * codiff * MatrixXd::Identity(n, n);
  return norm_or_zero(R.norm(), std::sqrt(sphere.alpha()) * jet.omega.norm());
}

BoundSet theorem_bounds(int n, double rho, double P, BoundMode mode) {
  require(n >= 2, "dimension must be at least 2");
  require(rho > 0.0 && P > 0.0, "Ricci bounds must be positive");
  require(rho <= P, "rho must not exceed P");
  BoundSet b;
  b.mode = mode;
  if (mode == BoundMode::Conformal) {
    b.lower = n * rho / (n - 1.0);
    b.upper_printed = 2.0 * P;
    b.upper_rederived = b.upper_printed;
  } else {
    b.lower = 2.0 * rho;
    b.upper_printed = 2.0 * (n - 1.0) / (n + 1.0) * P;
    b.upper_rederived = 2.0 * (n + 1.0) / (n - 1.0) * P;
  }
  b.consistent_printed = b.lower <= b.upper_printed;
  b.consistent_rederived = b.lower <= b.upper_rederived;
  return b;
}

std::vector<VectorXd> sample_points(const SphereContext& sphere, int count, std::uint64_t seed) {
  sphere.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<VectorXd> points;
  points.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(points.size()) < count) {
    VectorXd p(sphere.n + 1);
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = gauss(rng);
    const double len = p.norm();
    if (len < 1e-8) continue;
    points.push_back(sphere.r * p / len);
  }
  return points;
}

std::vector<HarmonicPoly> linear_basis(const SphereContext& sphere) {
  std::vector<HarmonicPoly> out;
  for (int i = 0; i <= sphere.n; ++i) out.push_back(HarmonicPoly::linear(VectorXd::Unit(sphere.n + 1, i), sphere));
  return out;
}

std::vector<HarmonicPoly> quadratic_basis(const SphereContext& sphere) {
  const int N = sphere.n + 1;
  std::vector<HarmonicPoly> out;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      MatrixXd Q = MatrixXd::Zero(N, N);
      Q(i, j) = Q(j, i) = 1.0 / std::sqrt(2.0);
      out.push_back(HarmonicPoly::quadratic(Q, sphere));
    }
  for (int k = 1; k < N; ++k) {
    MatrixXd Q = MatrixXd::Zero(N, N);
    for (int i = 0; i < k; ++i) Q(i, i) = 1.0;
    Q(k, k) = -static_cast<double>(k);
    out.push_back(HarmonicPoly::quadratic(Q / std::sqrt(k * (k + 1.0)), sphere));
  }
  return out;
}

std::vector<RotationForm> rotation_basis(const SphereContext& sphere) {
  const int N = sphere.n + 1;
  std::vector<RotationForm> out;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      MatrixXd A = MatrixXd::Zero(N, N);
      A(i, j) = 1.0;
      A(j, i) = -1.0;
      out.push_back(RotationForm::make(A, sphere));
    }
  return out;
}

}  // namespace hodgelab::oracle
