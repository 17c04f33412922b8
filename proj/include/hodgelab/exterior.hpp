#pragma once

#include <ostream>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hodgelab/mesh.hpp"

namespace hodgelab {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Discrete differential form: one value per oriented simplex of `degree`,
// holding the integral of the form over that simplex.
struct Cochain {
  int degree = 0;
  Eigen::VectorXd values;

  static Cochain zeros(const TriangleMesh& mesh, int degree);
  // Throws unless the length matches the mesh and every value is finite.
  void check_against(const TriangleMesh& mesh) const;
};

std::size_t simplex_count(const TriangleMesh& mesh, int degree);

struct SparseOperator {
  SparseMatrix matrix;
  bool symmetric = false;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
  Eigen::VectorXd diagonal() const { return matrix.diagonal(); }
  bool is_diagonal() const;
};

// Exact symmetrization (A + A^T) / 2; the result equals its transpose bitwise.
SparseOperator make_symmetric(const SparseMatrix& m);
SparseOperator make_diagonal(const Eigen::VectorXd& diag);

SparseOperator d0(const TriangleMesh& mesh);
SparseOperator d1(const TriangleMesh& mesh);

// Barycentric lumped vertex areas.
SparseOperator star0(const TriangleMesh& mesh);
// Cotangent weights (cot a + cot b) / 2; may contain non-positive entries on
// poor meshes, see `count_nonpositive`.
SparseOperator star1(const TriangleMesh& mesh);
// Inverse face areas.
SparseOperator star2(const TriangleMesh& mesh);

Eigen::Index count_nonpositive(const SparseOperator& diagonal_op);

// Generalized pair (A, B) with A x = lambda B x the weak-form Laplacian.
struct OperatorPair {
  SparseOperator A;
  SparseOperator B;
};

OperatorPair laplacian0(const TriangleMesh& mesh);
OperatorPair laplacian1(const TriangleMesh& mesh);

// The two pieces of the 1-form stiffness: A = coexact part + exact part with
// coexact = d1^T star2 d1 and exact = star1 d0 star0^-1 d0^T star1.
struct OneFormParts {
  SparseOperator coexact;  // weak d*d
  SparseOperator exact;    // weak dd*
};
OneFormParts laplacian1_parts(const TriangleMesh& mesh);

struct CodifferentialNorms {
  double dstar = 0.0;  // ||d*w||_star0 / ||w||_star1
  double d = 0.0;      // ||dw||_star2 / ||w||_star1
};

CodifferentialNorms codifferential_norm(const TriangleMesh& mesh, const Cochain& omega);

// Positive codifferential of a 1-cochain: star0^-1 d0^T star1 w.
Eigen::VectorXd codifferential(const TriangleMesh& mesh, const Cochain& omega);

void write_matrix_market(const SparseOperator& op, std::ostream& out);

}  // namespace hodgelab
