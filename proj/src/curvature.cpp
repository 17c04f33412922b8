#include "hodgelab/curvature.hpp"

#include <cmath>
#include <cstdio>

#include "hodgelab/error.hpp"

namespace hodgelab {

CurvatureBounds angle_defect_curvature(const TriangleMesh& mesh, VertexArea area_kind) {
  const auto nv = static_cast<Eigen::Index>(mesh.vertex_count());
  CurvatureBounds out;
  out.angle_defects = Eigen::VectorXd::Constant(nv, 2.0 * M_PI);
  Eigen::VectorXd area = Eigen::VectorXd::Zero(nv);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto& v = mesh.faces[f];
    double angle[3], cot[3];
    int obtuse = -1;
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = mesh.vertices[v[k]];
      const Vec3 u = mesh.vertices[v[(k + 1) % 3]] - p;
      const Vec3 w = mesh.vertices[v[(k + 2) % 3]] - p;
      const double cross = u.cross(w).norm();
      angle[k] = std::atan2(cross, u.dot(w));
      cot[k] = u.dot(w) / cross;
      if (u.dot(w) < 0.0) obtuse = k;
      out.angle_defects[v[k]] -= angle[k];
    }
    const double face_area = mesh.face_area(f);
    for (int k = 0; k < 3; ++k) {
      if (area_kind == VertexArea::Barycentric) {
        area[v[k]] += face_area / 3.0;
      } else if (obtuse >= 0) {
        area[v[k]] += (k == obtuse ? 0.5 : 0.25) * face_area;
      } else {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        const Vec3& p = mesh.vertices[v[k]];
        area[v[k]] += 0.125 * ((mesh.vertices[v[j]] - p).squaredNorm() * cot[i] +
                               (mesh.vertices[v[i]] - p).squaredNorm() * cot[j]);
      }
    }
  }
  require(area.minCoeff() > 0.0, "vertex with zero lumped area", ErrorKind::MeshQuality);
  out.per_vertex_K = out.angle_defects.cwiseQuotient(area);
  out.rho = out.per_vertex_K.minCoeff();
  out.P_max = out.per_vertex_K.maxCoeff();
  out.defect_sum = out.angle_defects.sum();
  return out;
}

RicciBounds ricci_bounds(const CurvatureBounds& curvature, int dimension) {
  require(dimension == 2,
          "discrete Ricci bounds are only defined for surfaces (n = 2); use the sphere oracle");
  return {curvature.rho, curvature.P_max};
}

double ellipsoid_curvature_exact(double a, double b, double c, const Vec3& p) {
  require(a > 0.0 && b > 0.0 && c > 0.0, "ellipsoid semi-axes must be positive");
  const double level = p.x() * p.x() / (a * a) + p.y() * p.y() / (b * b) + p.z() * p.z() / (c * c);
  require(std::abs(level - 1.0) <= 1e-10, "point is not on the ellipsoid");
  const double h2 = p.x() * p.x() / std::pow(a, 4) + p.y() * p.y() / std::pow(b, 4) +
                    p.z() * p.z() / std::pow(c, 4);
  return 1.0 / (a * a * b * b * c * c * h2 * h2);
}

Eigen::VectorXd edge_curvature(const TriangleMesh& mesh, const Eigen::VectorXd& K) {
  require(static_cast<std::size_t>(K.size()) == mesh.vertex_count(),
          "curvature array does not match the vertex count");
  Eigen::VectorXd k(static_cast<Eigen::Index>(mesh.edge_count()));
  for (std::size_t e = 0; e < mesh.edge_count(); ++e)
    k[static_cast<Eigen::Index>(e)] = 0.5 * (K[mesh.edges[e][0]] + K[mesh.edges[e][1]]);
  return k;
}

Cochain ricci_apply(const TriangleMesh& mesh, const Eigen::VectorXd& K, const Cochain& omega) {
  require(omega.degree == 1, "Ric* acts on 1-cochains");
  omega.check_against(mesh);
  return {1, edge_curvature(mesh, K).cwiseProduct(omega.values)};
}

void write_curvature_csv(const CurvatureBounds& curvature, std::ostream& out) {
  out << "vertex,K\n";
  char buf[64];
  for (Eigen::Index v = 0; v < curvature.per_vertex_K.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g\n", static_cast<long>(v), curvature.per_vertex_K[v]);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing curvature CSV");
}

}  // namespace hodgelab
