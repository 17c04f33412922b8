#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace hodgelab::oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Round sphere S^n of radius r in R^(n+1); alpha = 1/r^2 and the Ricci
// endomorphism is (n - 1) alpha times the identity.
struct SphereContext {
  int n = 2;
  double r = 1.0;

  double alpha() const { return 1.0 / (r * r); }
  double ricci() const { return (n - 1) * alpha(); }
  void validate() const;
};

// Restriction of a harmonic polynomial of degree 0, 1 or 2 to the sphere:
// c, d . x, or x^T Q x with Q symmetric traceless.
class HarmonicPoly {
 public:
  static HarmonicPoly constant(double c, const SphereContext& sphere);
  static HarmonicPoly linear(const VectorXd& d, const SphereContext& sphere);
  static HarmonicPoly quadratic(const MatrixXd& Q, const SphereContext& sphere);

  int degree() const { return degree_; }
  const SphereContext& sphere() const { return sphere_; }
  const VectorXd& linear_coefficients() const { return d_; }
  const MatrixXd& quadratic_coefficients() const { return Q_; }

  double value(const VectorXd& x) const;
  VectorXd ambient_gradient(const VectorXd& x) const;
  MatrixXd ambient_hessian() const;  // constant for degree <= 2
  // Eigenvalue of the positive Laplacian, l (l + n - 1) / r^2.
  double eigenvalue() const;

  HarmonicPoly rotated(const MatrixXd& R) const;  // f(R^T x)

 private:
  HarmonicPoly(int degree, double c, VectorXd d, MatrixXd Q, const SphereContext& sphere)
      : degree_(degree), c_(c), d_(std::move(d)), Q_(std::move(Q)), sphere_(sphere) {}

  int degree_;
  double c_;
  VectorXd d_;
  MatrixXd Q_;
  SphereContext sphere_;
};

// Killing 1-form dual to the rotation field x -> A x, A antisymmetric.
struct RotationForm {
  MatrixXd A;
  SphereContext sphere;

  static RotationForm make(const MatrixXd& A, const SphereContext& sphere);
};

// Either df for a harmonic polynomial f or a rotation Killing form.
using OracleForm = std::variant<HarmonicPoly, RotationForm>;

// Rank-3 tangent tensor in an orthonormal frame.
class Tensor3 {
 public:
  explicit Tensor3(int n = 0) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}
  int dim() const { return n_; }
  double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
  double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }

 private:
  std::size_t index(int a, int b, int c) const {
    return static_cast<std::size_t>((a * n_ + b) * n_ + c);
  }
  int n_;
  std::vector<double> data_;
};

// Covariant jet of a 1-form at a point, in the orthonormal tangent frame
// `frame` ((n+1) x n columns):
//   omega(a)        = w(e_a)
//   nabla(a, b)     = (nabla_{e_a} w)(e_b)
//   nabla2(a, b, c) = (nabla_{e_a} nabla w)(e_b, e_c)
// For w = df these are df, the hessian, and the third derivative with the
// differentiation slot first (symmetric in the last two slots).
struct OneFormJet {
  MatrixXd frame;
  VectorXd normal;
  VectorXd omega;
  MatrixXd nabla;
  Tensor3 nabla2;
};

struct FunctionJet {
  MatrixXd frame;
  double value = 0.0;
  VectorXd df;
  MatrixXd hess;
  Tensor3 third;
};

double laplace_eigenvalue(int degree, int n, double r);

// Orthonormal basis of the tangent space at x (columns).
MatrixXd tangent_frame(const VectorXd& x);

FunctionJet covariant_derivatives(const HarmonicPoly& f, const VectorXd& x);
OneFormJet oneform_jet(const OracleForm& form, const VectorXd& x);

// Hessian as an ambient bilinear form: hess(Y, Z) = Y^T H Z for tangent Y, Z.
MatrixXd ambient_hessian_form(const HarmonicPoly& f, const VectorXd& x);

// |hess + (mu / n) f g| over the frame, normalized by max(|f|, |df|). Only
// defined for first eigenfunctions.
double obata_residual(const HarmonicPoly& f, const VectorXd& x);

// Third-order sphere equation with constant k; the coefficient 2 sits on the
// differentiation slot. Normalized by |df|.
double tanno_residual(const HarmonicPoly& f, const VectorXd& x, double k);
double tanno_residual(const HarmonicPoly& f, const VectorXd& x);  // k = alpha

struct GeneralizedTannoResidual {
  double printed = 0.0;        // phi = +dLf / (2 (n + 1))
  double opposite_sign = 0.0;  // phi = -dLf / (2 (n + 1))
};
GeneralizedTannoResidual generalized_tanno_residual(const HarmonicPoly& f, const VectorXd& x);

// Defining systems, normalized by alpha |w| (conformal: sqrt(alpha) |w|).
double projective_defining_residual(const OracleForm& form, const VectorXd& x);
double conformal_defining_residual(const OracleForm& form, const VectorXd& x);

// Pieces of the Hodge Laplacian computed from the jet.
struct LaplacianSplit {
  VectorXd omega;
  VectorXd dd_star;  // d d* w
  VectorXd d_star_d; // d* d w
  VectorXd laplacian;
  double codifferential = 0.0;  // d* w
};
LaplacianSplit hodge_laplacian(const OracleForm& form, const VectorXd& x);

// |Delta w - 2 Ric* w - 2/(n+1) d d* w| / (alpha |w|).
double yano_identity_residual(const OracleForm& form, const VectorXd& x);
// |Delta w - 2 Ric* w + (1 - 2/n) d d* w| / (alpha |w|).
double lichnerowicz_identity_residual(const OracleForm& form, const VectorXd& x);

enum class BoundMode { Conformal, Projective };

struct BoundSet {
  BoundMode mode = BoundMode::Conformal;
  double lower = 0.0;
  double upper_printed = 0.0;
  // Projective: 2 (n + 1) / (n - 1) P from pairing the eliminated identity
  // with w. Conformal: equal to upper_printed.
  double upper_rederived = 0.0;
  bool consistent_printed = true;  // lower <= upper_printed
  bool consistent_rederived = true;
};

BoundSet theorem_bounds(int n, double rho, double P, BoundMode mode);

// Fixed-seed uniformly distributed points on S^n(r).
std::vector<VectorXd> sample_points(const SphereContext& sphere, int count, std::uint64_t seed);

// Orthonormal bases for the degree-1 and degree-2 harmonics and rotations of
// R^(n+1), used by the exhaustive checks.
std::vector<HarmonicPoly> linear_basis(const SphereContext& sphere);
std::vector<HarmonicPoly> quadratic_basis(const SphereContext& sphere);
std::vector<RotationForm> rotation_basis(const SphereContext& sphere);

}  // namespace hodgelab::oracle
