#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hodgelab/curvature.hpp"
#include "hodgelab/exterior.hpp"
#include "hodgelab/fields.hpp"
#include "hodgelab/mesh.hpp"
#include "hodgelab/spectral.hpp"
#include "hodgelab/sphere_oracle.hpp"

namespace hodgelab {

using oracle::BoundMode;

enum class FieldClass { Killing, Gradient, Mixed };
enum class Attainment { Lower, Upper, Both, Interior, None };

std::string to_string(FieldClass c);
std::string to_string(Attainment a);
std::string to_string(BoundMode m);

// killing: ||d*w|| < tol <= ||dw||; gradient: ||dw|| < tol <= ||d*w||.
FieldClass classify_field(double norm_dstar, double norm_d, double tol);

struct BoundOutcome {
  BoundMode mode = BoundMode::Conformal;
  double lambda_hat = 0.0;
  double lower = 0.0;
  double upper_printed = 0.0;
  double upper_rederived = 0.0;
  bool satisfied_printed = false;
  bool satisfied_rederived = false;
  bool consistent_printed = true;  // printed interval non-empty
  Attainment attainment = Attainment::None;  // against lower / rederived upper
  double tolerance = 0.0;                    // relative
};

// Bounds are satisfied when lower (1 - tol) <= lambda <= upper (1 + tol);
// an endpoint is attained when |lambda - bound| <= tol * bound.
BoundOutcome check_bounds(double lambda_hat, double rho, double P, int n, BoundMode mode,
                          double tol);

enum class Identity { Yano, Lichnerowicz };
std::string to_string(Identity id);

// Operators shared by the discrete checks on one surface mesh.
// Dual: (A + B)^-1 weighted, converges under refinement. Mass: star1^-1
// weighted, stalls at the pointwise consistency error of the cotangent stars.
enum class ResidualNorm { Dual, Mass };

struct DiscreteContext {
  const TriangleMesh* mesh = nullptr;
  OneFormParts parts;
  SparseOperator stiffness;   // parts.coexact + parts.exact
  SparseOperator mass;        // star1
  Eigen::VectorXd edge_K;     // endpoint-averaged curvature
  CurvatureBounds curvature;
  std::shared_ptr<const DualNorm> dual;

  static DiscreteContext build(const TriangleMesh& mesh);
  double norm(const Eigen::VectorXd& r, ResidualNorm kind) const;
};

// Residual of Delta w = 2 Ric* w + c d d* w with c = 2/(n+1) (Yano) or
// c = -(1 - 2/n) (Lichnerowicz), relative to Delta w. n = 2.
double discrete_identity_residual(const DiscreteContext& ctx, const Cochain& omega, Identity which,
                                  ResidualNorm norm = ResidualNorm::Dual);
double discrete_identity_residual(const TriangleMesh& mesh, const Cochain& omega, Identity which,
                                  ResidualNorm norm = ResidualNorm::Dual);

struct MultiplicityRecord {
  std::string name;       // "conformal" or "projective"
  int measured = 0;
  int bound = 0;
  bool satisfied = false;  // measured <= bound
  bool equality = false;
  std::string detail;
};

struct MultiplicityReport {
  int first_group_size = 0;   // lambda ~ n alpha
  int second_group_size = 0;  // lambda ~ 2 (n + 1) alpha
  int first_coclosed = 0;     // Killing directions in the first group
  int first_exact = 0;
  int second_exact = 0;       // gradient directions in the second group
  int second_coclosed = 0;
  std::vector<MultiplicityRecord> records;
};

// Splits the two lowest 1-form clusters of a sphere into exact and coclosed
// directions and compares with the conformal and projective algebra
// dimensions (n+1)(n+2)/2 and n(n+2). Throws when the clusters are not
// resolved by the grouping.
MultiplicityReport multiplicity_check(const SpectrumResult& spectrum, const OneFormParts& parts,
                                      int n, double alpha);

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::KillingRotation;
  Vec3 vector = Vec3::UnitZ();  // axis or direction
  Mat3 Q = Mat3::Zero();
};

std::vector<FieldSpec> default_fields(const SurfaceSpec& surface);
AnalyticField make_field(const FieldSpec& spec, const SurfaceSpec& surface);

struct Tolerances {
  double bound_rel = 0.02;
  double class_tol = 1e-2;
  double group_rel_gap = kDefaultGroupRelGap;
  double solver_tol = 1e-6;
  double eigenform_tol = 0.1;
  double identity_tol = 0.05;
};

struct RunConfig {
  SurfaceSpec surface = SurfaceSpec::icosphere(5, 1.0);
  int scalar_eigenpairs = 10;
  int oneform_eigenpairs = 16;
  std::vector<int> levels = {3, 4, 5, 6};
  std::vector<FieldSpec> fields;  // empty: defaults for the surface
  Tolerances tolerances;
  std::uint64_t seed = 20240611;
  std::string report_path;
  std::string table_path;

  void validate() const;
};

inline constexpr int kMinResolvedLevel = 4;

// Level-dependent relative tolerance: `base` at level >= 5, widened by the
// O(h^2) factor 4 per coarser level.
double level_scaled(double base, int level);

struct CheckRecord {
  std::string name;
  bool passed = true;
  bool mandatory = true;
  std::string status;  // "PASS", "FAIL", "INCONSISTENT", "SKIPPED", ...
  std::string detail;
};

struct FieldRecord {
  std::string name;
  FieldKind kind = FieldKind::KillingRotation;
  double lambda = 0.0;
  double eigenform_residual = 0.0;       // dual norm
  double eigenform_residual_mass = 0.0;  // mass norm
  bool eigenform = false;
  double dstar_norm = 0.0;
  double d_norm = 0.0;
  FieldClass cls = FieldClass::Mixed;
  FieldClass expected = FieldClass::Mixed;
  double conformal_residual = 0.0;
  double killing_residual = 0.0;
  std::vector<BoundOutcome> bounds;
  std::string bounds_note;
  double yano = 0.0;
  double lichnerowicz = 0.0;
  double yano_mass = 0.0;
  double lichnerowicz_mass = 0.0;
};

struct OracleRecord {
  std::string name;
  std::string equation;
  int n = 2;
  double r = 1.0;
  double max_residual = 0.0;
  bool expect_zero = true;
  double threshold = 0.0;
  bool passed = false;
};

struct GroupSummary {
  double value = 0.0;
  int multiplicity = 0;
  std::vector<double> eigenvalues;
};

struct VerificationReport {
  SurfaceSpec surface;
  std::size_t vertices = 0, edges = 0, faces = 0;
  int genus = 0;
  bool mesh_valid = false;
  Eigen::Index star1_nonpositive = 0;
  double rho = 0.0, P = 0.0, defect_sum = 0.0;
  std::optional<double> rho_exact, P_exact;
  std::vector<GroupSummary> scalar_groups, oneform_groups;
  std::vector<FieldRecord> fields;
  std::vector<OracleRecord> oracle;
  std::vector<MultiplicityRecord> multiplicity;
  std::vector<CheckRecord> checks;
  std::uint64_t seed = 0;
  std::string timestamp;

  bool pass() const;
};

// Exact sphere checks for n in {2, 3, 5} and r in {1, 2}.
std::vector<OracleRecord> run_oracle_suite(std::uint64_t seed, int points = 100);

VerificationReport run_suite(const RunConfig& config);

}  // namespace hodgelab
