#pragma once

#include <string>

#include <Eigen/Core>

#include "hodgelab/exterior.hpp"
#include "hodgelab/mesh.hpp"

namespace hodgelab {

using Mat3 = Eigen::Matrix3d;

enum class FieldKind {
  KillingRotation,     // xi(x) = axis x x
  ConformalGradient,   // xi = grad (direction . x)
  ProjectiveGradient,  // xi = grad (x^T Q x), Q symmetric traceless
  Affine,              // xi = P_x(M x + v), arbitrary test field
};

std::string to_string(FieldKind kind);

// Tangent vector field on a built-in surface, given by the tangential
// projection of the ambient affine field M x + v.
class AnalyticField {
 public:
  static AnalyticField killing_rotation(const Vec3& axis, const SurfaceSpec& surface);
  static AnalyticField conformal_gradient(const Vec3& direction, const SurfaceSpec& surface);
  static AnalyticField projective_gradient(const Mat3& Q, const SurfaceSpec& surface);
  static AnalyticField affine(const Mat3& M, const Vec3& v, const SurfaceSpec& surface);

  FieldKind kind() const { return kind_; }
  const SurfaceSpec& surface() const { return surface_; }
  const Mat3& linear_part() const { return M_; }
  const Vec3& constant_part() const { return v_; }

  // Tangent vector at a surface point.
  Vec3 evaluate(const Vec3& x) const;

  // alpha * this + beta * other, both on the same surface.
  AnalyticField combine(double alpha, const AnalyticField& other, double beta) const;

 private:
  AnalyticField(FieldKind kind, const Mat3& M, const Vec3& v, const SurfaceSpec& surface)
      : kind_(kind), M_(M), v_(v), surface_(surface) {}

  FieldKind kind_;
  Mat3 M_;
  Vec3 v_;
  SurfaceSpec surface_;
};

// Unit outward normal of the analytic surface at an on-surface point.
Vec3 surface_normal(const SurfaceSpec& surface, const Vec3& x);
bool on_surface(const SurfaceSpec& surface, const Vec3& x, double tol = 1e-10);

// Edge integrals of the dual 1-form along chords projected onto the surface
// (4-point Gauss-Legendre), oriented low -> high.
Cochain sample_oneform(const AnalyticField& field, const TriangleMesh& mesh);

// Area-weighted RMS over faces of the trace-free symmetric part of the
// per-face linear reconstruction's Jacobian, normalized by the field RMS and
// the surface length scale sqrt(area / 4 pi).
double conformal_killing_residual(const TriangleMesh& mesh, const AnalyticField& field);
// Same with the full symmetric part.
double killing_residual(const TriangleMesh& mesh, const AnalyticField& field);

}  // namespace hodgelab
