#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hodgelab/error.hpp"
#include "hodgelab/verify.hpp"

using namespace hodgelab;

namespace {

const CheckRecord* find_check(const VerificationReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

const FieldRecord* find_field(const VerificationReport& r, const std::string& name) {
  for (const auto& f : r.fields)
    if (f.name == name) return &f;
  return nullptr;
}

Cochain sample(const TriangleMesh& m, const AnalyticField& f) { return sample_oneform(f, m); }

Mat3 quad_xy() {
  Mat3 Q = Mat3::Zero();
  Q(0, 1) = Q(1, 0) = 1.0 / std::sqrt(2.0);
  return Q;
}

SpectrumResult oneform_spectrum(const TriangleMesh& m, double rel_gap) {
  const OperatorPair L = laplacian1(m);
  SolverOptions o;
  o.count = 16;
  o.rel_gap = rel_gap;
  return solve_lowest(L.A, L.B, o);
}

}  // namespace

TEST_CASE("classification") {
  CHECK(classify_field(1e-6, 0.8, 1e-3) == FieldClass::Killing);
  CHECK(classify_field(0.9, 1e-7, 1e-3) == FieldClass::Gradient);
  CHECK(classify_field(0.5, 0.5, 1e-3) == FieldClass::Mixed);
  CHECK(classify_field(1e-6, 1e-7, 1e-3) == FieldClass::Mixed);
  CHECK(to_string(FieldClass::Killing) == "killing");
  CHECK(to_string(Identity::Yano) == "yano_2_2");
  CHECK(to_string(Identity::Lichnerowicz) == "lichnerowicz_3_2");
}

TEST_CASE("bound examples") {
  const BoundOutcome c = check_bounds(2.0, 1.0, 1.0, 2, BoundMode::Conformal, 0.02);
  CHECK(c.satisfied_printed);
  CHECK(c.satisfied_rederived);
  CHECK(c.attainment == Attainment::Both);

  const BoundOutcome p6 = check_bounds(6.0, 1.0, 1.0, 2, BoundMode::Projective, 0.02);
  CHECK_FALSE(p6.satisfied_printed);
  CHECK_FALSE(p6.consistent_printed);
  CHECK(p6.satisfied_rederived);
  CHECK(p6.attainment == Attainment::Upper);
  CHECK(p6.upper_printed == doctest::Approx(2.0 / 3.0));
  CHECK(p6.upper_rederived == doctest::Approx(6.0));

  const BoundOutcome p2 = check_bounds(2.0, 1.0, 1.0, 2, BoundMode::Projective, 0.02);
  CHECK(p2.attainment == Attainment::Lower);
  CHECK(p2.satisfied_rederived);

  const BoundOutcome interior = check_bounds(4.0, 1.0, 1.0, 2, BoundMode::Projective, 0.02);
  CHECK(interior.attainment == Attainment::Interior);
  const BoundOutcome outside = check_bounds(7.0, 1.0, 1.0, 2, BoundMode::Projective, 0.02);
  CHECK(outside.attainment == Attainment::None);
  CHECK_FALSE(outside.satisfied_rederived);

  CHECK_THROWS_AS(check_bounds(2.0, 2.0, 1.0, 2, BoundMode::Conformal, 0.02), Error);
  CHECK_THROWS_AS(check_bounds(-1.0, 1.0, 1.0, 2, BoundMode::Conformal, 0.02), Error);
}

TEST_CASE("bound satisfaction follows the tolerance band") {
  const double tol = 0.02;
  for (double lambda : {1.95, 1.961, 1.959, 6.11, 6.13}) {
    const BoundOutcome b = check_bounds(lambda, 1.0, 1.0, 2, BoundMode::Projective, tol);
    const bool expected = 2.0 * (1 - tol) <= lambda && lambda <= 6.0 * (1 + tol);
    CHECK(b.satisfied_rederived == expected);
  }
}

TEST_CASE("bounds are scale covariant") {
  for (double c2 : {0.25, 4.0, 9.0})
    for (double lambda : {1.9, 2.0, 3.1, 6.0, 6.5})
      for (BoundMode mode : {BoundMode::Conformal, BoundMode::Projective}) {
        const BoundOutcome a = check_bounds(lambda, 0.97, 1.03, 2, mode, 0.02);
        const BoundOutcome b = check_bounds(lambda / c2, 0.97 / c2, 1.03 / c2, 2, mode, 0.02);
        CHECK(a.satisfied_printed == b.satisfied_printed);
        CHECK(a.satisfied_rederived == b.satisfied_rederived);
        CHECK(a.attainment == b.attainment);
      }
}

TEST_CASE("level-scaled tolerance") {
  CHECK(level_scaled(0.02, 5) == 0.02);
  CHECK(level_scaled(0.02, 6) == 0.02);
  CHECK(level_scaled(0.02, 4) == doctest::Approx(0.08));
  CHECK(level_scaled(0.02, 3) == doctest::Approx(0.32));
}

TEST_CASE("discrete identity residuals on level 4") {
  const TriangleMesh m = build_icosphere(4, 1.0);
  const SurfaceSpec& s = *m.surface;
  const DiscreteContext ctx = DiscreteContext::build(m);
  const Cochain rot = sample(m, AnalyticField::killing_rotation(Vec3::UnitZ(), s));
  const Cochain grad = sample(m, AnalyticField::conformal_gradient(Vec3::UnitZ(), s));
  const Cochain quad = sample(m, AnalyticField::projective_gradient(quad_xy(), s));

  CHECK(discrete_identity_residual(ctx, rot, Identity::Yano) < 0.01);
  CHECK(discrete_identity_residual(ctx, quad, Identity::Yano) < 0.01);
  CHECK(discrete_identity_residual(ctx, grad, Identity::Yano) > 0.3);
  CHECK(discrete_identity_residual(ctx, rot, Identity::Lichnerowicz) < 0.01);
  CHECK(discrete_identity_residual(ctx, grad, Identity::Lichnerowicz) < 0.02);
  CHECK(discrete_identity_residual(ctx, quad, Identity::Lichnerowicz) > 0.3);

  // Smooth-limit relative residuals at n = 2.
  CHECK(discrete_identity_residual(ctx, grad, Identity::Yano) == doctest::Approx(2.0 / 3.0).epsilon(0.02));
  CHECK(discrete_identity_residual(ctx, quad, Identity::Lichnerowicz) == doctest::Approx(2.0 / 3.0).epsilon(0.02));

  // Both overloads agree.
  CHECK(discrete_identity_residual(m, rot, Identity::Yano) ==
        doctest::Approx(discrete_identity_residual(ctx, rot, Identity::Yano)).epsilon(1e-6));

  // The mass-weighted residual does not vanish: the cotangent stars are not pointwise consistent.
  CHECK(discrete_identity_residual(ctx, rot, Identity::Yano, ResidualNorm::Mass) > 0.05);

  CHECK_THROWS_AS(discrete_identity_residual(ctx, Cochain{1, Eigen::VectorXd::Ones(5)}, Identity::Yano), Error);
  CHECK_THROWS_AS(discrete_identity_residual(ctx, Cochain::zeros(m, 1), Identity::Yano), Error);
}

TEST_CASE("multiplicity on level 3") {
  const TriangleMesh m = build_icosphere(3, 1.0);
  const MultiplicityReport r = multiplicity_check(oneform_spectrum(m, kDefaultGroupRelGap), laplacian1_parts(m), 2, 1.0);
  CHECK(r.first_group_size == 6);
  CHECK(r.second_group_size == 10);
  CHECK(r.first_coclosed == 3);
  CHECK(r.first_exact == 3);
  CHECK(r.second_exact == 5);
  CHECK(r.second_coclosed == 5);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[0].name == "conformal");
  CHECK(r.records[0].measured == 6);
  CHECK(r.records[0].bound == 6);
  CHECK(r.records[0].equality);
  CHECK(r.records[1].name == "projective");
  CHECK(r.records[1].measured == 8);
  CHECK(r.records[1].bound == 8);
  CHECK(r.records[1].equality);
}

TEST_CASE("multiplicity refuses unresolved clusters") {
  const TriangleMesh m = build_icosphere(1, 1.0);
  const SpectrumResult s = oneform_spectrum(m, 0.02);
  CHECK_THROWS_WITH_AS(multiplicity_check(s, laplacian1_parts(m), 2, 1.0),
                       "eigenvalue clusters not resolved: refine mesh or loosen grouping", Error);
  const TriangleMesh m3 = build_icosphere(3, 1.0);
  CHECK_THROWS_AS(multiplicity_check(oneform_spectrum(m3, 2.0), laplacian1_parts(m3), 2, 1.0), Error);
}

TEST_CASE("default fields") {
  const auto sphere = default_fields(SurfaceSpec::icosphere(5, 1.0));
  CHECK(sphere.size() == 11);
  CHECK(std::count_if(sphere.begin(), sphere.end(), [](const FieldSpec& f) { return f.kind == FieldKind::KillingRotation; }) == 3);
  CHECK(std::count_if(sphere.begin(), sphere.end(), [](const FieldSpec& f) { return f.kind == FieldKind::ConformalGradient; }) == 3);
  CHECK(std::count_if(sphere.begin(), sphere.end(), [](const FieldSpec& f) { return f.kind == FieldKind::ProjectiveGradient; }) == 5);
  for (const auto& f : sphere)
    if (f.kind == FieldKind::ProjectiveGradient) {
      CHECK(std::abs(f.Q.trace()) < 1e-15);
      CHECK(f.Q.norm() == doctest::Approx(1.0));
    }
  CHECK(default_fields(SurfaceSpec::spheroid(5, 1.0, 2.0)).size() == 2);
}

TEST_CASE("config validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.tolerances.bound_rel = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  c.scalar_eigenpairs = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  c.surface.level = 9;
  try {
    c.validate();
    FAIL("expected guard");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResourceGuard);
  }
}

TEST_CASE("oracle suite") {
  const auto records = run_oracle_suite(20240611);
  CHECK(records.size() == 114);
  for (const auto& r : records) {
    INFO(r.name, " n=", r.n, " r=", r.r, " value ", r.max_residual);
    CHECK(r.passed);
  }
  const auto again = run_oracle_suite(20240611);
  for (std::size_t i = 0; i < records.size(); ++i) CHECK(records[i].max_residual == again[i].max_residual);
}

TEST_CASE("level 0 run reports insufficient resolution") {
  RunConfig c;
  c.surface = SurfaceSpec::icosphere(0, 1.0);
  c.scalar_eigenpairs = 10;
  c.oneform_eigenpairs = 16;
  const VerificationReport r = run_suite(c);
  CHECK(r.vertices == 12);
  CHECK(r.pass());
  const auto insufficient = std::count_if(r.checks.begin(), r.checks.end(), [](const CheckRecord& k) {
    return k.status == "INSUFFICIENT RESOLUTION";
  });
  CHECK(insufficient > 0);
  const CheckRecord* gb = find_check(r, "Gauss-Bonnet");
  REQUIRE(gb != nullptr);
  CHECK(gb->status == "PASS");
  CHECK(r.fields.size() == 11);
  CHECK(r.oracle.size() == 114);
}

TEST_CASE("stage failures are recorded and the report is still returned") {
  RunConfig c;
  c.surface = SurfaceSpec::icosphere(1, 1.0);
  FieldSpec bad{"bad", FieldKind::KillingRotation, Vec3::Zero(), Mat3::Zero()};
  c.fields = {bad};
  const VerificationReport r = run_suite(c);
  const CheckRecord* stage = find_check(r, "stage field bad");
  REQUIRE(stage != nullptr);
  CHECK(stage->status == "FAIL");
  CHECK(stage->mandatory);
  CHECK_FALSE(r.pass());
  CHECK(r.oracle.size() == 114);
}

TEST_CASE("spheroid rotation field is flagged as not an eigenform") {
  RunConfig c;
  c.surface = SurfaceSpec::spheroid(4, 1.0, 2.0);
  const VerificationReport r = run_suite(c);
  const FieldRecord* rot = find_field(r, "rot_z");
  REQUIRE(rot != nullptr);
  CHECK_FALSE(rot->eigenform);
  CHECK(rot->eigenform_residual > 0.2);
  CHECK(rot->bounds.empty());
  CHECK(rot->bounds_note == "hypothesis Δω = λω violated");
  CHECK(rot->cls == FieldClass::Killing);
  const CheckRecord* flag = find_check(r, "field rot_z: not an eigenform");
  REQUIRE(flag != nullptr);
  CHECK(flag->status == "NOT AN EIGENFORM");
  CHECK(r.rho < r.P);
  CHECK(r.rho_exact.has_value());
  CHECK(*r.P_exact == doctest::Approx(4.0));
  CHECK(r.multiplicity.empty());
}

TEST_CASE("unit sphere level 4 run") {
  RunConfig c;
  c.surface = SurfaceSpec::icosphere(4, 1.0);
  const VerificationReport r = run_suite(c);
  for (const auto& k : r.checks) {
    INFO(k.name, ": ", k.status, " ", k.detail);
    CHECK((k.passed || !k.mandatory));
  }
  CHECK(r.pass());
  for (const auto& f : r.fields) {
    INFO(f.name);
    CHECK(f.cls == f.expected);
    CHECK(f.eigenform);
    for (const auto& b : f.bounds) {
      const bool endpoint = b.attainment == Attainment::Lower || b.attainment == Attainment::Upper ||
                            b.attainment == Attainment::Both;
      CHECK(endpoint);
    }
  }
  const CheckRecord* printed = find_check(r, "projective upper (printed)");
  REQUIRE(printed != nullptr);
  CHECK(printed->status == "INCONSISTENT");
  CHECK_FALSE(printed->mandatory);
}
