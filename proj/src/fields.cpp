#include "hodgelab/fields.hpp"

#include <array>
#include <cmath>

#include <Eigen/LU>

#include "hodgelab/error.hpp"

namespace hodgelab {

namespace {

Mat3 cross_matrix(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return m;
}

Vec3 unit(const Vec3& v, const char* what) {
  const double n = v.norm();
  require(n > 0.0 && std::isfinite(n), std::string(what) + " must be a non-zero vector");
  return v / n;
}

Eigen::Vector3d axis_scale(const SurfaceSpec& s) { return {s.a, s.a, s.c}; }

// 4-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 4> kGaussNodes = {
    0.5 - 0.5 * 0.8611363115940526, 0.5 - 0.5 * 0.3399810435848563,
    0.5 + 0.5 * 0.3399810435848563, 0.5 + 0.5 * 0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights = {
    0.5 * 0.3478548451374538, 0.5 * 0.6521451548625461, 0.5 * 0.6521451548625461,
    0.5 * 0.3478548451374538};

enum class Residual { Conformal, Killing };

double jacobian_residual(const TriangleMesh& mesh, const AnalyticField& field, Residual which) {
  require(mesh.surface.has_value() && mesh.surface->same_surface(field.surface()),
          "field surface does not match the mesh surface");
  std::vector<Vec3> xi(mesh.vertex_count());
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) xi[v] = field.evaluate(mesh.vertices[v]);

  double density = 0.0, magnitude = 0.0, total_area = 0.0;
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto& [i0, i1, i2] = mesh.faces[f];
    const Vec3& p0 = mesh.vertices[i0];
    const Vec3 n = mesh.face_normal(f);
    const Vec3 e1 = (mesh.vertices[i1] - p0).normalized();
    const Vec3 e2 = n.cross(e1);
    auto local = [&](const Vec3& v) { return Eigen::Vector2d(v.dot(e1), v.dot(e2)); };
    Eigen::Matrix2d dp, dxi;
    dp << local(mesh.vertices[i1] - p0), local(mesh.vertices[i2] - p0);
    dxi << local(xi[i1] - xi[i0]), local(xi[i2] - xi[i0]);
    const Eigen::Matrix2d J = dxi * dp.inverse();
    Eigen::Matrix2d sym = 0.5 * (J + J.transpose());
    if (which == Residual::Conformal) sym -= 0.5 * J.trace() * Eigen::Matrix2d::Identity();
    const double area = mesh.face_area(f);
    density += area * sym.squaredNorm();
    magnitude += area * (xi[i0].squaredNorm() + xi[i1].squaredNorm() + xi[i2].squaredNorm()) / 3.0;
    total_area += area;
  }
  require(magnitude > 0.0, "residual of the zero field is undefined");
  const double length = std::sqrt(total_area / (4.0 * M_PI));
  return length * std::sqrt(density / magnitude);
}

}  // namespace

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::KillingRotation: return "killing_rotation";
    case FieldKind::ConformalGradient: return "conformal_gradient";
    case FieldKind::ProjectiveGradient: return "projective_gradient";
    case FieldKind::Affine: return "affine";
  }
  return "unknown";
}

AnalyticField AnalyticField::killing_rotation(const Vec3& axis, const SurfaceSpec& surface) {
  surface.validate();
  return {FieldKind::KillingRotation, cross_matrix(unit(axis, "rotation axis")), Vec3::Zero(),
          surface};
}

AnalyticField AnalyticField::conformal_gradient(const Vec3& direction, const SurfaceSpec& surface) {
  surface.validate();
  return {FieldKind::ConformalGradient, Mat3::Zero(), unit(direction, "gradient direction"),
          surface};
}

AnalyticField AnalyticField::projective_gradient(const Mat3& Q, const SurfaceSpec& surface) {
  surface.validate();
  require((Q - Q.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff()),
          "projective coefficient matrix must be symmetric");
  require(std::abs(Q.trace()) < 1e-12, "projective coefficient matrix must be traceless");
  return {FieldKind::ProjectiveGradient, 2.0 * Q, Vec3::Zero(), surface};
}

AnalyticField AnalyticField::affine(const Mat3& M, const Vec3& v, const SurfaceSpec& surface) {
  surface.validate();
  return {FieldKind::Affine, M, v, surface};
}

Vec3 AnalyticField::evaluate(const Vec3& x) const {
  require(on_surface(surface_, x), "evaluation point is not on the field's surface");
  const Vec3 n = surface_normal(surface_, x);
  const Vec3 ambient = M_ * x + v_;
  return ambient - n.dot(ambient) * n;
}

AnalyticField AnalyticField::combine(double alpha, const AnalyticField& other, double beta) const {
  require(surface_.same_surface(other.surface_), "cannot combine fields on different surfaces");
  const FieldKind kind = kind_ == other.kind_ ? kind_ : FieldKind::Affine;
  return {kind, alpha * M_ + beta * other.M_, alpha * v_ + beta * other.v_, surface_};
}

bool on_surface(const SurfaceSpec& surface, const Vec3& x, double tol) {
  const Vec3 s = axis_scale(surface);
  return std::abs(x.cwiseQuotient(s).squaredNorm() - 1.0) <= tol;
}

Vec3 surface_normal(const SurfaceSpec& surface, const Vec3& x) {
  const Vec3 s = axis_scale(surface);
  return x.cwiseQuotient(s.cwiseProduct(s)).normalized();
}

Cochain sample_oneform(const AnalyticField& field, const TriangleMesh& mesh) {
  require(mesh.surface.has_value() && mesh.surface->same_surface(field.surface()),
          "field surface does not match the mesh surface");
  const Vec3 s = axis_scale(field.surface());
  Cochain out = Cochain::zeros(mesh, 1);
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    const Vec3& p = mesh.vertices[mesh.edges[e][0]];
    const Vec3 chord = mesh.vertices[mesh.edges[e][1]] - p;
    // Curve q(t) = S u/|u| with u = S^-1 (p + t chord).
    const Vec3 du = chord.cwiseQuotient(s);
    double integral = 0.0;
    for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
      const Vec3 u = (p + kGaussNodes[g] * chord).cwiseQuotient(s);
      const double r = u.norm();
      const Vec3 dir = u / r;
      const Vec3 q = dir.cwiseProduct(s);
      const Vec3 dq = ((du - dir * dir.dot(du)) / r).cwiseProduct(s);
      integral += kGaussWeights[g] * field.evaluate(q).dot(dq);
    }
    out.values[static_cast<Eigen::Index>(e)] = integral;
  }
  return out;
}

double conformal_killing_residual(const TriangleMesh& mesh, const AnalyticField& field) {
  return jacobian_residual(mesh, field, Residual::Conformal);
}

double killing_residual(const TriangleMesh& mesh, const AnalyticField& field) {
  return jacobian_residual(mesh, field, Residual::Killing);
}

}  // namespace hodgelab
