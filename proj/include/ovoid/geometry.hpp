#pragma once

// Point-line geometries and their two metrics.
//
// The incidence graph numbers points first (0..P-1) and then lines
// (P..P+L-1). delta() is the distance in that graph; point_dist() is the
// distance in the collinearity graph, lifted to lines by taking minima over
// incident points.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ovoid {

using Vertex = std::uint32_t;
using PointSet = std::vector<std::uint32_t>;

struct PointId {
  std::uint32_t index;
  friend bool operator==(PointId, PointId) = default;
};

struct LineId {
  std::uint32_t index;
  friend bool operator==(LineId, LineId) = default;
};

/// Distance in a graph; empty when the two vertices lie in different components.
using Distance = std::optional<int>;

namespace detail {
struct DistanceCache;
}

class Geometry {
 public:
  /// Builds a geometry from its lines. Every line must be strictly increasing
  /// with entries in [0, num_points); throws DomainError otherwise.
  Geometry(std::string name, std::size_t num_points, std::vector<std::vector<std::uint32_t>> lines);

  const std::string& name() const { return name_; }
  std::size_t num_points() const { return num_points_; }
  std::size_t num_lines() const { return lines_.size(); }
  std::size_t num_vertices() const { return num_points_ + lines_.size(); }

  const std::vector<std::vector<std::uint32_t>>& lines() const { return lines_; }
  const std::vector<std::uint32_t>& points_on(LineId l) const { return lines_[l.index]; }
  const std::vector<std::uint32_t>& lines_through(PointId p) const { return points_to_lines_[p.index]; }

  Vertex vertex(PointId p) const { return p.index; }
  Vertex vertex(LineId l) const { return static_cast<Vertex>(num_points_ + l.index); }
  bool is_point(Vertex v) const { return v < num_points_; }
  PointId as_point(Vertex v) const { return {v}; }
  LineId as_line(Vertex v) const { return {static_cast<std::uint32_t>(v - num_points_)}; }

  /// Neighbours of a vertex in the incidence graph, as vertex ids.
  std::span<const Vertex> neighbours(Vertex v) const { return adjacency_[v]; }

  bool incident(PointId p, LineId l) const;

  /// BFS distances from `source` in the incidence graph; kUnreachable marks
  /// other components. Rows are cached and safe to share between threads.
  std::span<const std::uint16_t> delta_row(Vertex source) const;
  /// BFS distances from `source` in the point graph.
  std::span<const std::uint16_t> point_graph_row(PointId source) const;

  static constexpr std::uint16_t kUnreachable = 0xFFFF;

 private:
  std::string name_;
  std::size_t num_points_;
  std::vector<std::vector<std::uint32_t>> lines_;
  std::vector<std::vector<std::uint32_t>> points_to_lines_;
  std::vector<std::vector<Vertex>> adjacency_;
  std::shared_ptr<detail::DistanceCache> cache_;
};

/// Incidence-graph distance.
Distance delta(const Geometry& g, Vertex a, Vertex b);

/// Point-graph distances d(x, y), d(x, l) and d(l, l'), each computed as the
/// minimum over incident points. Throws DomainError for l == l'.
Distance point_dist(const Geometry& g, PointId x, PointId y);
Distance point_dist(const Geometry& g, PointId x, LineId l);
Distance point_dist(const Geometry& g, LineId l, PointId x);
Distance point_dist(const Geometry& g, LineId l, LineId m);

/// Points at point-graph distance at most `radius` from a point or a line.
PointSet ball(const Geometry& g, PointId x, int radius);
PointSet ball(const Geometry& g, LineId l, int radius);

struct GPReport {
  bool is_valid = false;
  int n = 0;
  int s = -1;
  int t = -1;
  bool regular = false;
  Distance diameter;
  std::optional<int> girth;  // empty for forests
  // Point-graph axioms, checked only for even n.
  std::optional<bool> axiom1_ok;
  std::optional<bool> axiom2_ok;
  std::optional<std::pair<Vertex, Vertex>> failure_witness;
  std::string failure;
};

/// Checks the generalized n-gon axioms: regular line sizes and point degrees,
/// incidence-graph diameter n and girth 2n. For n = 2d also checks the two
/// point-graph axioms exhaustively.
GPReport validate_gp(const Geometry& g, int n);

/// Incidence-graph girth from a BFS at every vertex; empty for acyclic graphs.
std::optional<int> girth(const Geometry& g);

/// Point-line dual. dualize(dualize(g)) has the same incidence lists as g.
Geometry dualize(const Geometry& g);

/// The sub-geometry on the given points and lines, with incidence restricted
/// to those points. Indices are renumbered in the order given.
Geometry induced_subgeometry(const Geometry& g, std::span<const std::uint32_t> points,
                             std::span<const std::uint32_t> lines, std::string name);

Geometry load_geometry(const std::filesystem::path& path);
Geometry parse_geometry(const std::string& text);
void save_geometry(const Geometry& g, const std::filesystem::path& path);
std::string geometry_to_json(const Geometry& g);

}  // namespace ovoid
