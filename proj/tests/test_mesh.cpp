#include <doctest.h>

#include <sstream>
#include <string>

#include "hodgelab/error.hpp"
#include "hodgelab/exterior.hpp"
#include "hodgelab/mesh.hpp"

using namespace hodgelab;

namespace {

bool has_failure(const ValidationOutcome& v, const std::string& message) {
  for (const auto& c : v.checks)
    if (!c.passed && c.message == message) return true;
  return false;
}

struct OffCounts {
  std::size_t v = 0, f = 0;
  std::vector<Vec3> points;
};

OffCounts parse_off(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  in >> header;
  REQUIRE(header == "OFF");
  OffCounts out;
  std::size_t zero = 0;
  in >> out.v >> out.f >> zero;
  for (std::size_t i = 0; i < out.v; ++i) {
    Vec3 p;
    in >> p.x() >> p.y() >> p.z();
    out.points.push_back(p);
  }
  for (std::size_t i = 0; i < out.f; ++i) {
    int three = 0, a = 0, b = 0, c = 0;
    in >> three >> a >> b >> c;
    REQUIRE(three == 3);
  }
  REQUIRE(static_cast<bool>(in));
  return out;
}

}  // namespace

TEST_CASE("icosphere combinatorics follow the closed form") {
  for (int s = 0; s <= 4; ++s) {
    const TriangleMesh m = build_icosphere(s, 1.0);
    const std::size_t p = std::size_t{1} << (2 * s);
    CHECK(m.vertex_count() == 10 * p + 2);
    CHECK(m.edge_count() == 30 * p);
    CHECK(m.face_count() == 20 * p);
    CHECK(m.euler_characteristic() == 2);
  }
  const TriangleMesh m2 = build_icosphere(2, 1.0);
  CHECK(m2.vertex_count() == 162);
  CHECK(m2.edge_count() == 480);
  CHECK(m2.face_count() == 320);
}

TEST_CASE("icosphere radii") {
  for (double r : {1.0, 2.5}) {
    const TriangleMesh m = build_icosphere(3, r);
    for (const auto& p : m.vertices) CHECK(std::abs(p.norm() / r - 1.0) < 1e-14);
  }
  for (const auto& p : build_icosphere(0, 1.0).vertices) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("refinement shrinks the longest edge") {
  double prev = build_icosphere(0, 1.0).max_edge_length();
  for (int s = 1; s <= 5; ++s) {
    const double h = build_icosphere(s, 1.0).max_edge_length();
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("generated meshes validate") {
  for (int s = 0; s <= 3; ++s) {
    const ValidationOutcome v = validate(build_icosphere(s, 1.0));
    CHECK(v.passed());
    CHECK(v.genus == 0);
  }
  const TriangleMesh sph = build_spheroid(2, 1.0, 2.0);
  CHECK(sph.vertex_count() == 162);
  CHECK(validate(sph).passed());
  CHECK(validate(build_spheroid(3, 2.0, 0.5)).passed());
}

TEST_CASE("exterior derivatives compose to zero on generated meshes") {
  for (int s = 0; s <= 3; ++s) {
    const TriangleMesh m = build_icosphere(s, 1.0);
    const SparseMatrix dd = d1(m).matrix * d0(m).matrix;
    CHECK(dd.norm() == 0.0);
  }
  const TriangleMesh s = build_spheroid(2, 1.0, 2.0);
  CHECK((d1(s).matrix * d0(s).matrix).norm() == 0.0);
}

TEST_CASE("spheroid with a == c is the icosphere") {
  const TriangleMesh ico = build_icosphere(3, 1.0);
  const TriangleMesh sph = build_spheroid(3, 1.0, 1.0);
  REQUIRE(ico.vertex_count() == sph.vertex_count());
  for (std::size_t i = 0; i < ico.vertex_count(); ++i) CHECK(ico.vertices[i] == sph.vertices[i]);
  CHECK(ico.faces == sph.faces);
}

TEST_CASE("spheroid keeps poles on the axis") {
  const TriangleMesh m = build_spheroid(0, 1.0, 2.0);
  bool found = false;
  for (const auto& p : m.vertices)
    if (p.isApprox(Vec3(0, 0, 2), 1e-15)) found = true;
  CHECK(found);
  for (const auto& p : m.vertices) {
    const double q = (p.x() * p.x() + p.y() * p.y()) + p.z() * p.z() / 4.0;
    CHECK(q == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("spheroid map preserves longitude and the equator") {
  const Vec3 p = Vec3(0.3, -0.4, 0.0).normalized();
  const Vec3 q = conformal_to_spheroid(p, 1.5, 0.7);
  CHECK(q.z() == doctest::Approx(0.0));
  CHECK(q.x() == doctest::Approx(1.5 * p.x()));
  CHECK(q.y() == doctest::Approx(1.5 * p.y()));
  const Vec3 r = conformal_to_spheroid(Vec3(0.6, 0.0, 0.8), 1.0, 2.0);
  CHECK(r.y() == doctest::Approx(0.0));
  CHECK(r.x() > 0.0);
  CHECK(r.z() > 0.0);
}

TEST_CASE("resource guard and argument checks") {
  try {
    build_icosphere(9, 1.0);
    FAIL("expected guard");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResourceGuard);
  }
  CHECK_THROWS_AS(build_icosphere(-1, 1.0), Error);
  CHECK_THROWS_AS(build_icosphere(1, 0.0), Error);
  CHECK_THROWS_AS(build_spheroid(1, 1.0, -2.0), Error);
  CHECK_THROWS_AS(build_spheroid(9, 1.0, 2.0), Error);
}

TEST_CASE("validation flags a flipped face") {
  TriangleMesh m = build_icosphere(1, 1.0);
  auto faces = m.faces;
  std::swap(faces[0][1], faces[0][2]);
  const ValidationOutcome v = validate(TriangleMesh::from_faces(m.vertices, faces));
  CHECK_FALSE(v.passed());
  CHECK(has_failure(v, "inconsistent orientation"));
}

TEST_CASE("validation flags a duplicated face") {
  TriangleMesh m = build_icosphere(1, 1.0);
  auto faces = m.faces;
  faces.push_back(faces[3]);
  const ValidationOutcome v = validate(TriangleMesh::from_faces(m.vertices, faces));
  CHECK_FALSE(v.passed());
  CHECK(has_failure(v, "edge with >2 incident faces"));
}

TEST_CASE("validation flags an open surface and a degenerate triangle") {
  TriangleMesh m = build_icosphere(1, 1.0);
  auto faces = m.faces;
  faces.pop_back();
  CHECK_FALSE(validate(TriangleMesh::from_faces(m.vertices, faces)).passed());

  std::vector<Vec3> verts = m.vertices;
  const auto f = m.faces[0];
  verts[f[2]] = 0.5 * (verts[f[0]] + verts[f[1]]);
  const ValidationOutcome v = validate(TriangleMesh::from_faces(verts, m.faces));
  CHECK(has_failure(v, "degenerate triangle"));
}

TEST_CASE("OFF export") {
  const TriangleMesh ico = build_icosphere(0, 1.0);
  std::ostringstream out;
  export_off(ico, out);
  const std::string text = out.str();
  CHECK(text.rfind("OFF\n12 20 0\n", 0) == 0);

  const OffCounts back = parse_off(text);
  CHECK(back.v == 12);
  CHECK(back.f == 20);
  for (std::size_t i = 0; i < back.v; ++i) CHECK(back.points[i] == ico.vertices[i]);

  std::ostringstream sph;
  export_off(build_spheroid(0, 1.0, 2.0), sph);
  CHECK(sph.str().find("\n0 0 2\n") != std::string::npos);

  std::ostringstream broken;
  broken.setstate(std::ios::badbit);
  CHECK_THROWS_AS(export_off(ico, broken), Error);
}
