#include "hodgelab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "hodgelab/error.hpp"

namespace hodgelab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajorMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

constexpr double kDropThreshold = 1e-12;

// B-orthonormal basis of span(S) by scaled Gram eigendecomposition; columns
// that are numerically dependent are dropped.
MatrixXd svqb(const MatrixXd& S, const VectorXd& b) {
  if (S.cols() == 0) return S;
  MatrixXd basis = S;
  for (int pass = 0; pass < 2; ++pass) {
    MatrixXd G = basis.transpose() * (b.asDiagonal() * basis);
    G = 0.5 * (G + G.transpose()).eval();
    VectorXd scale = G.diagonal();
    const double largest = scale.maxCoeff();
    if (!(largest > 0.0)) return MatrixXd(S.rows(), 0);
    for (Eigen::Index j = 0; j < scale.size(); ++j)
      scale[j] = scale[j] > largest * 1e-300 ? 1.0 / std::sqrt(scale[j]) : 0.0;
    const MatrixXd Gs = scale.asDiagonal() * G * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Gs);
    const VectorXd& theta = eig.eigenvalues();
    const double top = theta.maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < theta.size(); ++j)
      if (theta[j] > kDropThreshold * top) keep.push_back(j);
    MatrixXd T(basis.cols(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      T.col(static_cast<Eigen::Index>(j)) =
          scale.asDiagonal() * eig.eigenvectors().col(keep[j]) / std::sqrt(theta[keep[j]]);
    basis = basis * T;
    // One pass leaves an orthonormality error of order eps / theta_min.
    if (keep.empty() || theta[keep.front()] > 1e-4 * top) break;
  }
  return basis;
}

void project_out(MatrixXd& W, const MatrixXd& Y, const VectorXd& b) {
  if (Y.cols() == 0 || W.cols() == 0) return;
  W -= Y * (Y.transpose() * (b.asDiagonal() * W));
}

struct Ritz {
  MatrixXd vectors;
  MatrixXd a_vectors;
  VectorXd values;
};

// Rayleigh-Ritz on a B-orthonormal basis, keeping the lowest `keep` pairs.
Ritz rayleigh_ritz(const RowMajorMatrix& A, const MatrixXd& Q, Eigen::Index keep) {
  const MatrixXd AQ = A * Q;
  MatrixXd H = Q.transpose() * AQ;
  H = 0.5 * (H + H.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(H);
  keep = std::min(keep, Q.cols());
  const MatrixXd C = eig.eigenvectors().leftCols(keep);
  return {Q * C, AQ * C, eig.eigenvalues().head(keep)};
}

VectorXd column_residuals(const MatrixXd& AX, const MatrixXd& X, const VectorXd& lambda,
                          const VectorXd& b) {
  VectorXd r(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const VectorXd bx = b.cwiseProduct(X.col(j));
    r[j] = (AX.col(j) - lambda[j] * bx).norm() / bx.norm();
  }
  return r;
}

// Approximate solve of (A + shift B) W = R by a fixed number of
// Jacobi-preconditioned CG steps per column, starting from the Jacobi guess.
class InnerPreconditioner {
 public:
  InnerPreconditioner(const RowMajorMatrix& a, const VectorXd& b, int steps, double shift)
      : a_(a), b_(b), steps_(steps), shift_(steps > 0 ? shift : 0.0) {
    inv_diag_ = a.diagonal() + shift_ * b;
    for (Eigen::Index i = 0; i < inv_diag_.size(); ++i)
      inv_diag_[i] = inv_diag_[i] > 0.0 ? 1.0 / inv_diag_[i] : 1.0 / b[i];
  }

  MatrixXd apply(const MatrixXd& r) const {
    MatrixXd x = inv_diag_.asDiagonal() * r;
    if (steps_ == 0) return x;
    MatrixXd res = r - op(x);
    MatrixXd z = inv_diag_.asDiagonal() * res;
    MatrixXd p = z;
    Eigen::RowVectorXd rz = res.cwiseProduct(z).colwise().sum();
    for (int k = 0; k < steps_; ++k) {
      const MatrixXd q = op(p);
      const Eigen::RowVectorXd pq = p.cwiseProduct(q).colwise().sum();
      Eigen::RowVectorXd alpha(pq.size());
      for (Eigen::Index j = 0; j < pq.size(); ++j)
        alpha[j] = (pq[j] > 0.0 && rz[j] > 0.0) ? rz[j] / pq[j] : 0.0;
      x += p * alpha.asDiagonal();
      res -= q * alpha.asDiagonal();
      z = inv_diag_.asDiagonal() * res;
      const Eigen::RowVectorXd rz_next = res.cwiseProduct(z).colwise().sum();
      Eigen::RowVectorXd beta(rz.size());
      for (Eigen::Index j = 0; j < rz.size(); ++j) beta[j] = rz[j] > 0.0 ? rz_next[j] / rz[j] : 0.0;
      p = z + p * beta.asDiagonal();
      rz = rz_next;
    }
    return x;
  }

 private:
  MatrixXd op(const MatrixXd& v) const { return a_ * v + shift_ * (b_.asDiagonal() * v); }

  const RowMajorMatrix& a_;
  const VectorXd& b_;
  int steps_;
  double shift_;
  VectorXd inv_diag_;
};

VectorXd checked_mass(const SparseOperator& B) {
  require(B.is_diagonal(), "mass operator must be diagonal");
  const VectorXd b = B.diagonal();
  require(b.size() > 0 && b.minCoeff() > 0.0 && b.allFinite(),
          "mass operator B is not SPD");
  return b;
}

}  // namespace

int SpectrumResult::group_near(double target) const {
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double d = std::abs(groups[g].value - target);
    if (d < dist) {
      dist = d;
      best = static_cast<int>(g);
    }
  }
  return best;
}

SpectrumResult solve_lowest(const SparseOperator& A, const SparseOperator& B,
                            const SolverOptions& options) {
  const Eigen::Index n = A.rows();
  require(A.cols() == n && B.rows() == n && B.cols() == n, "operator dimensions disagree");
  require(options.count >= 1 && options.count <= n,
          "requested eigenpair count must lie in [1, dimension]");
  require(options.tol > 0.0, "solver tolerance must be positive");
  const VectorXd b = checked_mass(B);
  const RowMajorMatrix a = A.matrix;

  MatrixXd Y;
  if (options.deflation.cols() > 0) {
    require(options.deflation.rows() == n, "deflation vectors have the wrong length");
    Y = svqb(options.deflation, b);
  } else {
    Y = MatrixXd(n, 0);
  }
  const Eigen::Index kept_deflation = std::min<Eigen::Index>(Y.cols(), options.count);
  const Eigen::Index wanted = options.count - kept_deflation;

  SpectrumResult result;
  MatrixXd X(n, 0), AX(n, 0);
  VectorXd lambda;
  if (wanted > 0) {
    const Eigen::Index block = std::min<Eigen::Index>(wanted + options.padding, n - Y.cols());
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss;
    X = MatrixXd(n, block);
    for (Eigen::Index j = 0; j < block; ++j)
      for (Eigen::Index i = 0; i < n; ++i) X(i, j) = gauss(rng);
    project_out(X, Y, b);
    X = svqb(X, b);
    Ritz ritz = rayleigh_ritz(a, X, block);
    X = std::move(ritz.vectors);
    AX = std::move(ritz.a_vectors);
    lambda = ritz.values;


    std::vector<double> best(static_cast<std::size_t>(wanted),
                             std::numeric_limits<double>::infinity());
    MatrixXd P(n, 0);
    int it = 0;
    for (;; ++it) {
      const MatrixXd R = AX - b.asDiagonal() * X * lambda.asDiagonal();
      const VectorXd res = column_residuals(AX, X, lambda, b);
      bool done = true;
      for (Eigen::Index j = 0; j < wanted; ++j) {
        best[j] = std::min(best[j], res[j]);
        if (!(res[j] < options.tol)) done = false;
      }
      if (done) break;
      if (it >= options.max_iterations) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "eigensolver did not converge in %d iterations (worst residual %.3e, tol %.1e)",
                      it, *std::max_element(best.begin(), best.end()), options.tol);
        throw SolverError(buf, best);
      }

      const double shift = std::max(lambda.cwiseAbs().maxCoeff(), 1e-12 * (a.diagonal().cwiseQuotient(b)).cwiseAbs().maxCoeff());
      const InnerPreconditioner precond(a, b, options.inner_iterations, shift);
      std::vector<Eigen::Index> active;
      for (Eigen::Index j = 0; j < X.cols(); ++j)
        if (!(res[j] < options.tol)) active.push_back(j);
      MatrixXd W(n, static_cast<Eigen::Index>(active.size()));
      for (std::size_t j = 0; j < active.size(); ++j)
        W.col(static_cast<Eigen::Index>(j)) = R.col(active[j]);
      W = precond.apply(W);
      project_out(W, Y, b);
      project_out(W, X, b);

      MatrixXd S(n, X.cols() + W.cols() + P.cols());
      S << X, W, P;
      MatrixXd Q = svqb(S, b);
      project_out(Q, Y, b);
      Ritz next = rayleigh_ritz(a, Q, X.cols());

      // Search direction: the part of the new iterate not in the old block.
      MatrixXd step = next.vectors - X * (X.transpose() * (b.asDiagonal() * next.vectors));
      P = MatrixXd(n, static_cast<Eigen::Index>(active.size()));
      for (std::size_t j = 0; j < active.size(); ++j)
        P.col(static_cast<Eigen::Index>(j)) = step.col(active[j]);

      X = std::move(next.vectors);
      AX = std::move(next.a_vectors);
      lambda = next.values;
    }
    result.iterations = it;
    X.conservativeResize(n, wanted);
    AX.conservativeResize(n, wanted);
    lambda.conservativeResize(wanted);
  }

  // Assemble deflated pairs and iterated pairs, sorted ascending.
  const Eigen::Index total = kept_deflation + wanted;
  MatrixXd V(n, total);
  V << Y.leftCols(kept_deflation), X;
  const MatrixXd AV = a * V;
  VectorXd values(total);
  for (Eigen::Index j = 0; j < total; ++j) values[j] = V.col(j).dot(AV.col(j));
  const VectorXd res = column_residuals(AV, V, values, b);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return values[i] < values[j]; });
  result.eigenvectors = MatrixXd(n, total);
  for (Eigen::Index j = 0; j < total; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    result.eigenvectors.col(j) = V.col(src);
    result.eigenvalues.push_back(values[src]);
    result.residuals.push_back(res[src]);
  }
  result.groups = group_multiplicities(result.eigenvalues, options.rel_gap);
  return result;
}

double rayleigh_quotient(const SparseOperator& A, const SparseOperator& B,
                         const Eigen::VectorXd& x) {
  require(x.size() == A.cols() && x.size() == B.cols(), "vector length does not match operators");
  const double denom = x.dot(B.matrix * x);
  require(x.squaredNorm() > 0.0 && denom != 0.0, "Rayleigh quotient of the zero vector");
  return x.dot(A.matrix * x) / denom;
}

double eigenform_residual(const SparseOperator& A, const SparseOperator& B,
                          const Eigen::VectorXd& x) {
  const VectorXd b = checked_mass(B);
  const double q = rayleigh_quotient(A, B, x);
  const VectorXd r = A.matrix * x - q * b.cwiseProduct(x);
  return std::sqrt(r.dot(r.cwiseQuotient(b))) / std::sqrt(x.dot(b.cwiseProduct(x)));
}

DualNorm::DualNorm(const SparseOperator& A, const SparseOperator& B, double tol)
    : M_(A.matrix + B.matrix), tol_(tol) {
  require(A.rows() == B.rows() && A.cols() == B.cols() && A.rows() == A.cols(),
          "operator pair dimensions do not match");
  checked_mass(B);
  inv_diag_ = M_.diagonal().cwiseInverse();
}

double DualNorm::operator()(const Eigen::VectorXd& r) const {
  require(r.size() == M_.rows(), "vector length does not match the operator");
  const double rr = r.squaredNorm();
  if (rr == 0.0) return 0.0;
  // Jacobi-preconditioned CG for y = M^-1 r.
  VectorXd y = VectorXd::Zero(r.size());
  VectorXd res = r;
  VectorXd z = inv_diag_.cwiseProduct(res);
  VectorXd p = z;
  double rz = res.dot(z);
  const double stop = tol_ * tol_ * rr;
  for (Eigen::Index it = 0; it < 10 * r.size() && res.squaredNorm() > stop; ++it) {
    const VectorXd Mp = M_ * p;
    const double step = rz / p.dot(Mp);
    y += step * p;
    res -= step * Mp;
    z = inv_diag_.cwiseProduct(res);
    const double rz_next = res.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return std::sqrt(std::max(0.0, r.dot(y)));
}

double eigenform_residual_dual(const SparseOperator& A, const DualNorm& norm,
                               const SparseOperator& B, const Eigen::VectorXd& x) {
  const double q = rayleigh_quotient(A, B, x);
  const VectorXd Ax = A.matrix * x;
  const double scale = norm(Ax);
  require(scale > 0.0, "dual eigenform residual of a harmonic form is undefined");
  return norm(Ax - q * (B.matrix * x)) / scale;
}

std::vector<EigenGroup> group_multiplicities(const std::vector<double>& eigenvalues,
                                             double rel_gap) {
  constexpr double floor = 1e-8;
  std::vector<EigenGroup> groups;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double v = eigenvalues[i];
    bool merge = false;
    if (!groups.empty()) {
      const double prev = eigenvalues[i - 1];
      const double scale = std::max({std::abs(prev), std::abs(v), floor});
      merge = std::abs(v - prev) / scale < rel_gap;
    }
    if (!merge) groups.push_back({});
    auto& g = groups.back();
    g.members.push_back(static_cast<int>(i));
    g.multiplicity = static_cast<int>(g.members.size());
  }
  for (auto& g : groups) {
    double sum = 0.0;
    for (int m : g.members) sum += eigenvalues[static_cast<std::size_t>(m)];
    g.value = sum / g.multiplicity;
  }
  return groups;
}

void write_spectrum_csv(const SpectrumResult& spectrum, std::ostream& out) {
  std::vector<int> group_of(spectrum.eigenvalues.size(), -1);
  for (std::size_t g = 0; g < spectrum.groups.size(); ++g)
    for (int m : spectrum.groups[g].members) group_of[static_cast<std::size_t>(m)] = static_cast<int>(g);
  out << "index,eigenvalue,residual,group\n";
  char buf[128];
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.6e,%d\n", i, spectrum.eigenvalues[i],
                  spectrum.residuals[i], group_of[i]);
    out << buf;
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing spectrum CSV");
}

}  // namespace hodgelab
