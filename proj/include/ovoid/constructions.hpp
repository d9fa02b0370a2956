#pragma once

// Coordinate models: PG(2,q), the flag hexagon H(q,1) and the dual split
// Cayley hexagon H(q)^D, plus subhexagons of order (q,1) inside H(q)^D.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ovoid/field.hpp"
#include "ovoid/geometry.hpp"

namespace ovoid {

using Vec3 = std::array<Elem, 3>;

/// Normalized vectors (first nonzero coordinate 1) of F_q^3 in lexicographic
/// order. They index both the points of PG(2,q) and, read as normal vectors
/// a with line {x : a.x = 0}, its lines.
std::vector<Vec3> pg2_coordinates(const FiniteField& f);

Elem dot(const FiniteField& f, const Vec3& a, const Vec3& b);

Geometry build_pg2(const FiniteField& f);

/// Flags (point, line) of PG(2,q), grouped by point and then by line index.
/// Flag k is point k of the flag hexagon.
std::vector<std::pair<std::uint32_t, std::uint32_t>> pg2_flags(const FiniteField& f);

/// H(q,1): points are the flags of PG(2,q); lines 0..N-1 are the points of
/// PG(2,q) and lines N..2N-1 its lines, N = q^2+q+1.
Geometry build_flag_hexagon(const FiniteField& f);

using Grassmann = std::array<Elem, 21>;

/// p_ij = x_i y_j - x_j y_i for i < j, ordered (0,1), (0,2), ..., (5,6).
/// Throws DomainError if x and y are linearly dependent.
Grassmann grassmann(const FiniteField& f, const Vec7& x, const Vec7& y);

/// p_ij for any i != j, with p_ji = -p_ij.
Elem grassmann_coord(const FiniteField& f, const Grassmann& g, int i, int j);

/// Coordinates behind build_dual_split_cayley.
struct DualSplitCayley {
  Geometry geometry;
  /// Line k of the geometry: a normalized isotropic vector (lexicographic order).
  std::vector<Vec7> line_vectors;
  /// Point k: reduced row-echelon basis of the 2-space (lexicographic order).
  std::vector<std::array<Vec7, 2>> point_bases;
  int q = 0;
  std::string modulus;

  nlohmann::json manifest() const;
};

/// H(q)^D for q in {2, 3, 4}: lines are the isotropic 1-spaces of Q, points
/// the totally isotropic 2-spaces with p12=p34, p54=p32, p20=p35, p65=p30,
/// p01=p36, p46=p31; incidence is containment.
DualSplitCayley build_dual_split_cayley_model(const FiniteField& f);
Geometry build_dual_split_cayley(const FiniteField& f);

/// A subgeometry of an ambient hexagon, by index sets into it.
struct SubHex {
  PointSet point_ids;
  std::vector<std::uint32_t> line_ids;

  friend bool operator==(const SubHex&, const SubHex&) = default;
};

/// Induced sub-geometry of `h` on the subhexagon's points and lines.
Geometry subhex_geometry(const Geometry& h, const SubHex& s);

/// Closure of two opposite lines (incidence distance 6) under geodesics: all
/// shortest paths between opposite lines and the unique shortest path between
/// any two elements at distance < 6. The result is checked to be a hexagon of
/// order (s, 1). `shuffle_seed` randomizes the processing order (the result
/// must not depend on it).
SubHex subhexagon_closure(const Geometry& h, LineId l1, LineId l2,
                          std::optional<std::uint64_t> shuffle_seed = std::nullopt);

struct SubhexEnumeration {
  std::vector<SubHex> subhexagons;  // sorted by point set
  bool complete = false;
  std::size_t closures = 0;
};

/// Every subhexagon of order (q,1) of H(q)^D, one closure per not yet covered
/// opposite line pair. When complete, the count and the per-point incidence
/// count are checked against q^3(1+q)(q^2-q+1)/2 and (1+q)q^3/2.
/// Stops early, with complete = false, after `max_closures` closures.
SubhexEnumeration enumerate_subhexagons(const Geometry& h, int q,
                                        std::optional<std::size_t> max_closures = std::nullopt);

std::uint64_t expected_subhexagon_count(int q);
std::uint64_t expected_subhexagons_per_point(int q);

/// The subhexagon generated by line 0 and the lowest-indexed line opposite it.
SubHex first_subhexagon(const Geometry& h);

/// An incidence-preserving bijection from a flag hexagon onto a subhexagon,
/// expressed in ambient indices.
struct Embedding {
  std::vector<std::uint32_t> point_map;
  std::vector<std::uint32_t> line_map;

  PointSet map_points(const PointSet& pts) const;
};

/// Finds an isomorphism from `abstract` (an H(q,1)) onto the subhexagon `s`
/// of `h` by backtracking in BFS order, checking all distances to mapped
/// vertices. Throws InternalError if none exists or the result fails
/// verification.
Embedding embed_isomorphism(const Geometry& abstract, const Geometry& h, const SubHex& s);

}  // namespace ovoid
