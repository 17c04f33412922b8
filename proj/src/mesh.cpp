#include "hodgelab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "hodgelab/error.hpp"

namespace hodgelab {

namespace {

std::uint64_t edge_key(int i, int j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
         static_cast<std::uint32_t>(j);
}

// Regular icosahedron with vertices at both poles, inscribed in the unit sphere.
TriangleMesh unit_icosahedron() {
  std::vector<Vec3> v;
  const double h = 1.0 / std::sqrt(5.0);
  const double s = 2.0 / std::sqrt(5.0);
  v.emplace_back(0.0, 0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    const double t = 2.0 * M_PI * k / 5.0;
    v.emplace_back(s * std::cos(t), s * std::sin(t), h);
  }
  for (int k = 0; k < 5; ++k) {
    const double t = 2.0 * M_PI * k / 5.0 + M_PI / 5.0;
    v.emplace_back(s * std::cos(t), s * std::sin(t), -h);
  }
  v.emplace_back(0.0, 0.0, -1.0);

  const int north = 0, south = 11;
  auto upper = [](int k) { return 1 + (k % 5); };
  auto lower = [](int k) { return 6 + (k % 5); };
  std::vector<std::array<int, 3>> f;
  for (int k = 0; k < 5; ++k) {
    f.push_back({north, upper(k), upper(k + 1)});
    f.push_back({upper(k), lower(k), upper(k + 1)});
    f.push_back({upper(k + 1), lower(k), lower(k + 1)});
    f.push_back({south, lower(k + 1), lower(k)});
  }
  return TriangleMesh::from_faces(std::move(v), std::move(f));
}

// One Loop-style 4-to-1 split with midpoints pushed back onto the unit sphere.
TriangleMesh subdivide_unit(const TriangleMesh& mesh) {
  std::vector<Vec3> v = mesh.vertices;
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(mesh.edge_count());
  auto mid = [&](int i, int j) {
    const auto key = edge_key(i, j);
    if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(v.size());
    v.push_back((v[i] + v[j]).normalized());
    midpoint.emplace(key, idx);
    return idx;
  };
  std::vector<std::array<int, 3>> f;
  f.reserve(mesh.face_count() * 4);
  for (const auto& [a, b, c] : mesh.faces) {
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    f.push_back({a, ab, ca});
    f.push_back({b, bc, ab});
    f.push_back({c, ca, bc});
    f.push_back({ab, bc, ca});
  }
  return TriangleMesh::from_faces(std::move(v), std::move(f));
}

TriangleMesh unit_icosphere(int level) {
  require(level >= 0, "subdivision level must be non-negative");
  require(level <= kMaxSubdivisionLevel,
          "subdivision level " + std::to_string(level) + " exceeds the resource guard (max " +
              std::to_string(kMaxSubdivisionLevel) + ")",
          ErrorKind::ResourceGuard);
  TriangleMesh mesh = unit_icosahedron();
  for (int s = 0; s < level; ++s) mesh = subdivide_unit(mesh);
  return mesh;
}

}  // namespace

SurfaceSpec SurfaceSpec::icosphere(int level, double radius) {
  SurfaceSpec s{SurfaceKind::Icosphere, level, radius, radius};
  s.validate();
  return s;
}

SurfaceSpec SurfaceSpec::spheroid(int level, double a, double c) {
  SurfaceSpec s{SurfaceKind::Spheroid, level, a, c};
  s.validate();
  return s;
}

void SurfaceSpec::validate() const {
  require(level >= 0, "subdivision level must be non-negative");
  require(level <= kMaxSubdivisionLevel,
          "subdivision level " + std::to_string(level) + " exceeds the resource guard (max " +
              std::to_string(kMaxSubdivisionLevel) + ")",
          ErrorKind::ResourceGuard);
  require(a > 0.0 && c > 0.0 && std::isfinite(a) && std::isfinite(c),
          "surface semi-axes must be positive");
  if (kind == SurfaceKind::Icosphere) require(a == c, "icosphere requires a single radius");
}

bool SurfaceSpec::same_surface(const SurfaceSpec& other) const {
  return a == other.a && c == other.c;
}

std::string SurfaceSpec::name() const {
  char buf[128];
  if (kind == SurfaceKind::Icosphere)
    std::snprintf(buf, sizeof buf, "icosphere(level=%d, radius=%g)", level, a);
  else
    std::snprintf(buf, sizeof buf, "spheroid(level=%d, a=%g, c=%g)", level, a, c);
  return buf;
}

TriangleMesh TriangleMesh::from_faces(std::vector<Vec3> vertices,
                                      std::vector<std::array<int, 3>> faces) {
  TriangleMesh m;
  m.vertices = std::move(vertices);
  m.faces = std::move(faces);
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(m.faces.size() * 3 / 2 + 1);
  m.face_edges.resize(m.faces.size());
  m.face_edge_signs.resize(m.faces.size());
  for (std::size_t f = 0; f < m.faces.size(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const int i = m.faces[f][k];
      const int j = m.faces[f][(k + 1) % 3];
      const auto key = edge_key(i, j);
      auto [it, inserted] = index.try_emplace(key, static_cast<int>(m.edges.size()));
      if (inserted) {
        m.edges.push_back({std::min(i, j), std::max(i, j)});
        m.edge_to_faces.emplace_back();
      }
      m.edge_to_faces[it->second].push_back(static_cast<int>(f));
      m.face_edges[f][k] = it->second;
      m.face_edge_signs[f][k] = i < j ? 1 : -1;
    }
  }
  return m;
}

int TriangleMesh::euler_characteristic() const {
  return static_cast<int>(vertex_count()) - static_cast<int>(edge_count()) +
         static_cast<int>(face_count());
}

double TriangleMesh::face_area(std::size_t f) const {
  const auto& [a, b, c] = faces[f];
  return 0.5 * (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]).norm();
}

Vec3 TriangleMesh::face_normal(std::size_t f) const {
  const auto& [a, b, c] = faces[f];
  return (vertices[b] - vertices[a]).cross(vertices[c] - vertices[a]).normalized();
}

double TriangleMesh::max_edge_length() const {
  double longest = 0.0;
  for (const auto& [i, j] : edges) longest = std::max(longest, (vertices[j] - vertices[i]).norm());
  return longest;
}

int TriangleMesh::find_edge(int i, int j) const {
  // Linear scan; diagnostics and tests only.
  const int lo = std::min(i, j), hi = std::max(i, j);
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e][0] == lo && edges[e][1] == hi) return static_cast<int>(e);
  return -1;
}

TriangleMesh build_icosphere(int level, double radius) {
  const SurfaceSpec spec = SurfaceSpec::icosphere(level, radius);
  TriangleMesh mesh = unit_icosphere(level);
  if (radius != 1.0)
    for (auto& p : mesh.vertices) p *= radius;
  mesh.surface = spec;
  return mesh;
}

Vec3 conformal_to_spheroid(const Vec3& p, double a, double c) {
  if (a == c) return a * p;
  const double z = std::clamp(p.z(), -1.0, 1.0);
  if (std::abs(z) == 1.0) return Vec3(0.0, 0.0, c * z);
  // Match isometric latitudes: atanh(z) on the sphere, t + g(tanh t) on the
  // spheroid with t the geodetic isometric term.
  const double k = c * c / (a * a) - 1.0;
  auto g = [k](double s) {
    if (k > 0.0) return std::sqrt(k) * std::atan(std::sqrt(k) * s);
    if (k < 0.0) return -std::sqrt(-k) * std::atanh(std::sqrt(-k) * s);
    return 0.0;
  };
  const double u = std::atanh(z);
  double t = u;
  for (int it = 0; it < 60; ++it) {
    const double s = std::tanh(t);
    const double f = t + g(s) - u;
    const double df = 1.0 + k * (1.0 - s * s) / (1.0 + k * s * s);
    const double step = f / df;
    t -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(t))) break;
  }
  const double sin_phi = std::tanh(t);
  const double cos_phi = std::sqrt(std::max(0.0, 1.0 - sin_phi * sin_phi));
  // Reduced latitude from geodetic latitude.
  const double h = std::hypot(a * cos_phi, c * sin_phi);
  const double cos_beta = a * cos_phi / h;
  const double sin_beta = c * sin_phi / h;
  const double rxy = std::hypot(p.x(), p.y());
  return Vec3(a * cos_beta * p.x() / rxy, a * cos_beta * p.y() / rxy, c * sin_beta);
}

TriangleMesh build_spheroid(int level, double a, double c) {
  const SurfaceSpec spec = SurfaceSpec::spheroid(level, a, c);
  TriangleMesh mesh = unit_icosphere(level);
  for (auto& p : mesh.vertices) p = conformal_to_spheroid(p, a, c);
  mesh.surface = spec;
  return mesh;
}

TriangleMesh build_surface(const SurfaceSpec& spec) {
  return spec.kind == SurfaceKind::Icosphere ? build_icosphere(spec.level, spec.a)
                                             : build_spheroid(spec.level, spec.a, spec.c);
}

bool ValidationOutcome::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationOutcome::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return c.message;
  return {};
}

ValidationOutcome validate(const TriangleMesh& mesh) {
  ValidationOutcome out;
  const int nv = static_cast<int>(mesh.vertex_count());

  ValidationCheck indices{"face indices", true, ""};
  for (const auto& f : mesh.faces) {
    for (int v : f)
      if (v < 0 || v >= nv) {
        indices = {"face indices", false, "face vertex index out of range"};
        break;
      }
    if (indices.passed && (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]))
      indices = {"face indices", false, "face with repeated vertex"};
    if (!indices.passed) break;
  }
  out.checks.push_back(indices);

  ValidationCheck manifold{"closed manifold", true, ""};
  ValidationCheck orientation{"orientation", true, ""};
  for (std::size_t e = 0; e < mesh.edge_count(); ++e) {
    const auto& inc = mesh.edge_to_faces[e];
    if (inc.size() > 2) {
      manifold = {"closed manifold", false, "edge with >2 incident faces"};
      continue;
    }
    if (inc.size() < 2) {
      if (manifold.passed) manifold = {"closed manifold", false, "boundary edge with 1 incident face"};
      continue;
    }
    auto sign_in = [&](int f) {
      for (int k = 0; k < 3; ++k)
        if (mesh.face_edges[f][k] == static_cast<int>(e)) return mesh.face_edge_signs[f][k];
      return 0;
    };
    if (sign_in(inc[0]) == sign_in(inc[1]))
      orientation = {"orientation", false, "inconsistent orientation"};
  }
  out.checks.push_back(manifold);
  out.checks.push_back(orientation);

  ValidationCheck area{"non-degenerate faces", true, ""};
  if (indices.passed && mesh.face_count() > 0) {
    std::vector<double> areas(mesh.face_count());
    for (std::size_t f = 0; f < mesh.face_count(); ++f) areas[f] = mesh.face_area(f);
    const double mean = std::accumulate(areas.begin(), areas.end(), 0.0) / areas.size();
    for (double a : areas)
      if (!(a > 1e-12 * mean)) {
        area = {"non-degenerate faces", false, "degenerate triangle"};
        break;
      }
  }
  out.checks.push_back(area);

  out.euler_characteristic = mesh.euler_characteristic();
  out.genus = (2 - out.euler_characteristic) / 2;
  ValidationCheck euler{"euler formula", true, ""};
  if ((2 - out.euler_characteristic) % 2 != 0 || out.genus < 0)
    euler = {"euler formula", false,
             "Euler characteristic " + std::to_string(out.euler_characteristic) +
                 " is not 2 - 2*genus"};
  out.checks.push_back(euler);
  return out;
}

void export_off(const TriangleMesh& mesh, std::ostream& out) {
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << " 0\n";
  char buf[96];
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  for (const auto& [a, b, c] : mesh.faces) out << "3 " << a << ' ' << b << ' ' << c << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing OFF stream");
}

}  // namespace hodgelab
