#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hodgelab {

using Vec3 = Eigen::Vector3d;

enum class SurfaceKind { Icosphere, Spheroid };

// Analytic surface a mesh approximates. Icospheres use a == c == radius.
struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::Icosphere;
  int level = 0;
  double a = 1.0;  // equatorial semi-axis (radius for icospheres)
  double c = 1.0;  // polar semi-axis

  static SurfaceSpec icosphere(int level, double radius);
  static SurfaceSpec spheroid(int level, double a, double c);

  void validate() const;
  bool same_surface(const SurfaceSpec& other) const;
  bool is_round() const { return a == c; }
  std::string name() const;
};

inline constexpr int kMaxSubdivisionLevel = 8;

// Oriented closed triangulated surface. Edges are canonical (low, high)
// vertex pairs; everything below `faces` is derived by `from_faces`.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::vector<int>> edge_to_faces;
  // Per face: edge index and orientation sign (+1 when the face traverses
  // the edge low -> high) for the sides (v0,v1), (v1,v2), (v2,v0).
  std::vector<std::array<int, 3>> face_edges;
  std::vector<std::array<int, 3>> face_edge_signs;
  std::optional<SurfaceSpec> surface;

  static TriangleMesh from_faces(std::vector<Vec3> vertices,
                                 std::vector<std::array<int, 3>> faces);

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t edge_count() const { return edges.size(); }
  std::size_t face_count() const { return faces.size(); }
  int euler_characteristic() const;

  double face_area(std::size_t f) const;
  Vec3 face_normal(std::size_t f) const;  // unit, orientation-induced
  double max_edge_length() const;

  // Index of canonical edge (i, j) in either order, or -1.
  int find_edge(int i, int j) const;
};

TriangleMesh build_icosphere(int level, double radius);
// Conformal map from the unit sphere onto the spheroid (a, a, c); fixes the
// poles and the longitude.
Vec3 conformal_to_spheroid(const Vec3& p, double a, double c);

TriangleMesh build_spheroid(int level, double a, double c);
TriangleMesh build_surface(const SurfaceSpec& spec);

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::string message;
};

struct ValidationOutcome {
  std::vector<ValidationCheck> checks;
  int euler_characteristic = 0;
  int genus = 0;

  bool passed() const;
  // First failure message, empty when everything passed.
  std::string first_failure() const;
};

ValidationOutcome validate(const TriangleMesh& mesh);

void export_off(const TriangleMesh& mesh, std::ostream& out);

}  // namespace hodgelab
