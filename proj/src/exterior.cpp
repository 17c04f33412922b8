#include "hodgelab/exterior.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "hodgelab/error.hpp"

namespace hodgelab {

namespace {

using Triplet = Eigen::Triplet<double>;

// Cotangent of the angle at `apex` in triangle (apex, p, q).
double cot_at(const Vec3& apex, const Vec3& p, const Vec3& q) {
  const Vec3 u = p - apex, v = q - apex;
  return u.dot(v) / u.cross(v).norm();
}

Eigen::VectorXd vertex_areas(const TriangleMesh& mesh) {
  Eigen::VectorXd area = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.vertex_count()));
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const double third = mesh.face_area(f) / 3.0;
    for (int v : mesh.faces[f]) area[v] += third;
  }
  return area;
}

}  // namespace

std::size_t simplex_count(const TriangleMesh& mesh, int degree) {
  switch (degree) {
    case 0: return mesh.vertex_count();
    case 1: return mesh.edge_count();
    case 2: return mesh.face_count();
    default: throw Error(ErrorKind::Precondition, "cochain degree must be 0, 1 or 2");
  }
}

Cochain Cochain::zeros(const TriangleMesh& mesh, int degree) {
  return {degree, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(simplex_count(mesh, degree)))};
}

void Cochain::check_against(const TriangleMesh& mesh) const {
  require(static_cast<std::size_t>(values.size()) == simplex_count(mesh, degree),
          "cochain length does not match the mesh simplex count");
  require(values.allFinite(), "cochain contains non-finite values");
}

bool SparseOperator::is_diagonal() const {
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) return false;
  return true;
}

SparseOperator make_symmetric(const SparseMatrix& m) {
  SparseMatrix t = m.transpose();
  SparseMatrix s = 0.5 * (m + t);
  s.prune(0.0);
  s.makeCompressed();
  return {std::move(s), true};
}

SparseOperator make_diagonal(const Eigen::VectorXd& diag) {
  SparseMatrix m(diag.size(), diag.size());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(diag.size()));
  for (Eigen::Index i = 0; i < diag.size(); ++i) t.emplace_back(i, i, diag[i]);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return {std::move(m), true};
}

SparseOperator d0(const TriangleMesh& mesh) {
  SparseMatrix m(static_cast<Eigen::Index>(mesh.edge_count()),
                 static_cast<Eigen::Index>(mesh.vertex_count()));
  std::vector<Triplet> t;
  t.reserve(2 * mesh.edge_count());
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    t.emplace_back(e, mesh.edges[e][0], -1.0);
    t.emplace_back(e, mesh.edges[e][1], 1.0);
  }
  m.setFromTriplets(t.begin(), t.end());
  return {std::move(m), false};
}

SparseOperator d1(const TriangleMesh& mesh) {
  SparseMatrix m(static_cast<Eigen::Index>(mesh.face_count()),
                 static_cast<Eigen::Index>(mesh.edge_count()));
  std::vector<Triplet> t;
  t.reserve(3 * mesh.face_count());
  for (std::size_t f = 0; f < mesh.face_count(); ++f)
    for (int k = 0; k < 3; ++k)
      t.emplace_back(f, mesh.face_edges[f][k], static_cast<double>(mesh.face_edge_signs[f][k]));
  m.setFromTriplets(t.begin(), t.end());
  return {std::move(m), false};
}

SparseOperator star0(const TriangleMesh& mesh) {
  const Eigen::VectorXd area = vertex_areas(mesh);
  require(area.minCoeff() > 0.0, "vertex with zero lumped area (degenerate mesh)",
          ErrorKind::MeshQuality);
  return make_diagonal(area);
}

SparseOperator star1(const TriangleMesh& mesh) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.edge_count()));
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const auto& v = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      // side k runs v[k] -> v[k+1]; the opposite corner is v[k+2]
      const Vec3& apex = mesh.vertices[v[(k + 2) % 3]];
      w[mesh.face_edges[f][k]] +=
          0.5 * cot_at(apex, mesh.vertices[v[k]], mesh.vertices[v[(k + 1) % 3]]);
    }
  }
  return make_diagonal(w);
}

SparseOperator star2(const TriangleMesh& mesh) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(mesh.face_count()));
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const double area = mesh.face_area(f);
    require(area > 0.0, "degenerate face with zero area", ErrorKind::MeshQuality);
    w[static_cast<Eigen::Index>(f)] = 1.0 / area;
  }
  return make_diagonal(w);
}

Eigen::Index count_nonpositive(const SparseOperator& diagonal_op) {
  const Eigen::VectorXd d = diagonal_op.diagonal();
  return static_cast<Eigen::Index>((d.array() <= 0.0).count());
}

OperatorPair laplacian0(const TriangleMesh& mesh) {
  const SparseMatrix D = d0(mesh).matrix;
  const SparseMatrix S1 = star1(mesh).matrix;
  const SparseMatrix A = D.transpose() * S1 * D;
  return {make_symmetric(A), star0(mesh)};
}

OneFormParts laplacian1_parts(const TriangleMesh& mesh) {
  const SparseOperator s0 = star0(mesh);
  const SparseOperator s1 = star1(mesh);
  require(count_nonpositive(s1) == 0, "mesh quality insufficient for 1-form mass",
          ErrorKind::MeshQuality);
  const SparseMatrix D0 = d0(mesh).matrix;
  const SparseMatrix D1 = d1(mesh).matrix;
  const SparseMatrix S2 = star2(mesh).matrix;
  const SparseMatrix S0inv = make_diagonal(s0.diagonal().cwiseInverse()).matrix;
  const SparseMatrix coexact = D1.transpose() * S2 * D1;
  const SparseMatrix grad = s1.matrix * D0;  // star1 d0
  const SparseMatrix exact = grad * S0inv * grad.transpose();
  return {make_symmetric(coexact), make_symmetric(exact)};
}

OperatorPair laplacian1(const TriangleMesh& mesh) {
  const OneFormParts parts = laplacian1_parts(mesh);
  SparseMatrix A = parts.coexact.matrix + parts.exact.matrix;
  return {make_symmetric(A), star1(mesh)};
}

Eigen::VectorXd codifferential(const TriangleMesh& mesh, const Cochain& omega) {
  require(omega.degree == 1, "codifferential expects a 1-cochain");
  omega.check_against(mesh);
  const Eigen::VectorXd s1 = star1(mesh).diagonal();
  const Eigen::VectorXd s0 = star0(mesh).diagonal();
  const Eigen::VectorXd div = d0(mesh).matrix.transpose() * s1.cwiseProduct(omega.values);
  return div.cwiseQuotient(s0);
}

CodifferentialNorms codifferential_norm(const TriangleMesh& mesh, const Cochain& omega) {
  require(omega.degree == 1, "codifferential_norm expects a 1-cochain");
  omega.check_against(mesh);
  const Eigen::VectorXd s1 = star1(mesh).diagonal();
  const double norm_b = std::sqrt(omega.values.dot(s1.cwiseProduct(omega.values)));
  require(norm_b > 0.0, "cannot normalize zero form");
  const Eigen::VectorXd s0 = star0(mesh).diagonal();
  const Eigen::VectorXd x = codifferential(mesh, omega);
  const Eigen::VectorXd y = d1(mesh).matrix * omega.values;
  const Eigen::VectorXd s2 = star2(mesh).diagonal();
  return {std::sqrt(x.dot(s0.cwiseProduct(x))) / norm_b,
          std::sqrt(y.dot(s2.cwiseProduct(y))) / norm_b};
}

void write_matrix_market(const SparseOperator& op, std::ostream& out) {
  SparseMatrix m = op.matrix;
  m.makeCompressed();
  std::vector<Triplet> entries;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      if (!op.symmetric || it.row() >= it.col()) entries.emplace_back(it.row(), it.col(), it.value());
  out << "%%MatrixMarket matrix coordinate real " << (op.symmetric ? "symmetric" : "general")
      << '\n'
      << m.rows() << ' ' << m.cols() << ' ' << entries.size() << '\n';
  char buf[64];
  for (const auto& t : entries) {
    std::snprintf(buf, sizeof buf, "%.17g", t.value());
    out << t.row() + 1 << ' ' << t.col() + 1 << ' ' << buf << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing Matrix Market stream");
}

}  // namespace hodgelab
