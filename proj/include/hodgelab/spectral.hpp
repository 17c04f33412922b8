#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "hodgelab/exterior.hpp"

namespace hodgelab {

inline constexpr double kDefaultGroupRelGap = 0.02;

struct EigenGroup {
  double value = 0.0;  // mean of the members
  int multiplicity = 0;
  std::vector<int> members;
};

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;     // B-orthonormal columns
  std::vector<double> residuals;    // ||Ax - lambda Bx|| / ||Bx||
  std::vector<EigenGroup> groups;
  int iterations = 0;

  // Index of the group whose value is closest to `target`, or -1.
  int group_near(double target) const;
};

struct SolverOptions {
  int count = 10;
  double tol = 1e-8;
  int max_iterations = 20000;
  int padding = 5;
  std::uint64_t seed = 20240611;
  double rel_gap = kDefaultGroupRelGap;
  // Preconditioner: `inner_iterations` steps of Jacobi-preconditioned CG on
  // (A + s B), s = largest current Ritz value, applied to each residual.
  // Zero gives plain diag(A) scaling.
  int inner_iterations = 16;
  // Known null-space columns (e.g. constants for the scalar Laplacian). They
  // are kept out of the iteration and reported as eigenpairs of their own.
  Eigen::MatrixXd deflation;
};

// Lowest `count` eigenpairs of A x = lambda B x for symmetric A and diagonal
// SPD B by block LOBPCG (matrix-vector products only, no factorization).
SpectrumResult solve_lowest(const SparseOperator& A, const SparseOperator& B,
                            const SolverOptions& options);

double rayleigh_quotient(const SparseOperator& A, const SparseOperator& B,
                         const Eigen::VectorXd& x);

// ||A x - q B x||_{B^-1} / ||x||_B with q the Rayleigh quotient of x.
double eigenform_residual(const SparseOperator& A, const SparseOperator& B,
                          const Eigen::VectorXd& x);

// r -> sqrt(r^T (A + B)^-1 r), the norm dual to the energy norm of (A, B).
// Applied by conjugate gradients; no factorization.
class DualNorm {
 public:
  DualNorm(const SparseOperator& A, const SparseOperator& B, double tol = 1e-9);
  double operator()(const Eigen::VectorXd& r) const;

 private:
  SparseMatrix M_;
  Eigen::VectorXd inv_diag_;
  double tol_;
};

// ||A x - q B x||_dual / ||A x||_dual. Unlike `eigenform_residual` this tends
// to zero under refinement for sampled smooth eigenforms.
double eigenform_residual_dual(const SparseOperator& A, const DualNorm& norm,
                               const SparseOperator& B, const Eigen::VectorXd& x);

std::vector<EigenGroup> group_multiplicities(const std::vector<double>& eigenvalues,
                                             double rel_gap = kDefaultGroupRelGap);

// CSV with header "index,eigenvalue,residual,group".
void write_spectrum_csv(const SpectrumResult& spectrum, std::ostream& out);

}  // namespace hodgelab
