#pragma once

// Exact hitting sets (dancing links), maximum packings (branch and bound),
// perfect-matching counts (Ryser) and LP model export.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ovoid/geometry.hpp"

namespace ovoid {

/// A hypergraph on points 0..universe_size-1. A hitting set meets every block
/// exactly once; a packing meets every block at most once.
struct HittingInstance {
  std::size_t universe_size = 0;
  std::vector<PointSet> blocks;
  std::vector<std::vector<std::uint32_t>> point_to_blocks;
  std::string origin;

  /// Validates (nonempty sorted blocks, indices in range) and builds the transpose.
  static HittingInstance make(std::size_t universe_size, std::vector<PointSet> blocks, std::string origin);

  /// True iff no block contains two points of `set`.
  bool is_packing(std::span<const std::uint32_t> set) const;
  /// True iff every block contains exactly one point of `set`.
  bool is_exact_hitting_set(std::span<const std::uint32_t> set) const;
};

/// Blocks for distance-j ovoids of a generalized 2d-gon: for even j one block
/// Gamma_{<=(j-2)/2}(l) per line, for odd j one block Gamma_{<=(j-1)/2}(p) per
/// point. d is read off the incidence-graph eccentricity of vertex 0. Throws
/// DomainError unless 2 <= j <= d.
HittingInstance build_hitting_instance(const Geometry& g, int j);

enum class SolveStatus { solution_found, exhausted_no_solution, budget_exceeded };

std::string to_string(SolveStatus s);

struct SolveOutcome {
  SolveStatus status = SolveStatus::exhausted_no_solution;
  std::vector<PointSet> solutions;  // at most `limit`
  std::uint64_t solution_count = 0;
  std::uint64_t nodes_expanded = 0;
  /// The whole search tree was explored.
  bool exhausted = false;
};

struct SearchLimits {
  std::optional<std::uint64_t> max_solutions;
  std::optional<std::uint64_t> max_nodes;
};

/// Streams every exact hitting set containing `forced` to `on_solution`
/// (return false to stop). Column choice: fewest remaining candidates, lowest
/// block index on ties. Throws DomainError if two forced points share a block.
SolveOutcome dlx_enumerate(const HittingInstance& inst, const PointSet& forced,
                           const std::function<bool(const PointSet&)>& on_solution, SearchLimits limits = {});

/// As dlx_enumerate, collecting up to `limits.max_solutions` solutions. Every
/// returned solution is re-verified.
SolveOutcome dlx_solve(const HittingInstance& inst, const PointSet& forced, SearchLimits limits = {});

/// The exact-cover formulation of perfect matchings of a geometry's incidence
/// graph: points are the incident (point, line) pairs, ordered by point and
/// then line; blocks are the points and then the lines of the geometry.
/// Throws DomainError when the two sides differ in size.
HittingInstance matching_instance(const Geometry& g);

/// Streams each perfect matching once, as a sorted set of pair indices.
SolveOutcome matchings_iterator(const Geometry& g, const std::function<bool(const PointSet&)>& on_matching,
                                SearchLimits limits = {});

using BigInt = boost::multiprecision::cpp_int;

/// Permanent of a square matrix by Ryser's formula with Gray-code updates.
/// Throws ResourceError for n > 24.
BigInt permanent_ryser(const std::vector<std::vector<int>>& m);

/// Point-by-line 0/1 incidence matrix.
std::vector<std::vector<int>> incidence_matrix(const Geometry& g);

enum class PackingStatus { optimal, bound_established, bound_refuted, budget_exceeded };

std::string to_string(PackingStatus s);

struct PackingOutcome {
  PackingStatus status = PackingStatus::optimal;
  /// Largest packing seen; for `optimal` a maximum one, for `bound_refuted`
  /// a witness larger than the target.
  PointSet best;
  std::uint64_t nodes_expanded = 0;
};

/// Maximum packing containing `forced`. With a target b the search only looks
/// for packings larger than b and stops at the first one. Bound: current size
/// plus a greedy cover of the candidates by residual blocks.
PackingOutcome max_packing(const HittingInstance& inst, const PointSet& forced,
                           std::optional<std::size_t> target = std::nullopt,
                           std::optional<std::uint64_t> max_nodes = std::nullopt);

enum class LpMode { exact, packing };

/// LP-format model: binary X{p}, one constraint e{k} per block (= 1 for exact,
/// <= 1 with objective max sum X for packing), forced points fixed to 1 in
/// the bounds section.
std::string lp_model(const HittingInstance& inst, const PointSet& forced, LpMode mode);
void export_lp(const HittingInstance& inst, const PointSet& forced, LpMode mode, const std::filesystem::path& path);

}  // namespace ovoid
