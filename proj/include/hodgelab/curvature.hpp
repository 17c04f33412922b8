#pragma once

#include <ostream>

#include <Eigen/Core>

#include "hodgelab/exterior.hpp"
#include "hodgelab/mesh.hpp"

namespace hodgelab {

struct CurvatureBounds {
  Eigen::VectorXd per_vertex_K;    // angle defect / vertex area
  Eigen::VectorXd angle_defects;   // 2 pi - sum of incident corner angles
  double rho = 0.0;                // min K
  double P_max = 0.0;              // max K
  double defect_sum = 0.0;         // equals 2 pi chi up to rounding
};

// Area that turns an angle defect into a curvature density. Mixed is the
// Voronoi cell clipped at obtuse triangles; barycentric does not converge at
// vertices of valence other than 6.
enum class VertexArea { Mixed, Barycentric };

CurvatureBounds angle_defect_curvature(const TriangleMesh& mesh,
                                       VertexArea area = VertexArea::Mixed);

struct RicciBounds {
  double rho = 0.0;
  double P = 0.0;
};

// Smallest and largest Ricci eigenvalues. On a surface Ric = K g, so both
// come from the Gaussian curvature; any other dimension is refused.
RicciBounds ricci_bounds(const CurvatureBounds& curvature, int dimension);

// Gaussian curvature of the ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1.
double ellipsoid_curvature_exact(double a, double b, double c, const Vec3& point);

// Ric* on edge cochains for n = 2: each edge value scaled by the mean of K
// over its endpoints.
Cochain ricci_apply(const TriangleMesh& mesh, const Eigen::VectorXd& K, const Cochain& omega);

// Per-edge factor used by `ricci_apply`.
Eigen::VectorXd edge_curvature(const TriangleMesh& mesh, const Eigen::VectorXd& K);

// CSV with header "vertex,K".
void write_curvature_csv(const CurvatureBounds& curvature, std::ostream& out);

}  // namespace hodgelab
