#pragma once

// Distance-2 ovoids of H(q)^D through the flag hexagon H(q,1): classify the
// ovoids of H(q,1), try to extend each class inside one embedded subhexagon,
// and bound partial ovoids.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ovoid/constructions.hpp"
#include "ovoid/exact_cover.hpp"
#include "ovoid/perm_group.hpp"

namespace ovoid {

inline constexpr const char* kToolVersion = "0.1.0";

/// (length, multiplicity) pairs, longest orbits first.
using OrbitLengths = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

OrbitLengths orbit_length_multiset(const std::vector<PointSet>& orbits);
std::string format_orbit_lengths(const OrbitLengths& l);

/// Which group classifies ovoids of H(q,1).
/// subhex_stabilizer: the group induced on an embedded H(q,1) by its
///   stabilizer in the automorphism group of H(q)^D, i.e. PSigmaL(3,q) with
///   the duality. Its kernel has order gcd(3, q-1), and reported stabilizer
///   orders count it.
/// full: the whole automorphism group PGammaL(3,q) with the duality.
enum class ClassifyGroup { subhex_stabilizer, full };

std::string to_string(ClassifyGroup g);
ClassifyGroup parse_classify_group(const std::string& s);

struct ClassifyGroupInfo {
  PermGroup action;
  std::uint64_t kernel_order = 1;
  /// |action| * kernel_order.
  std::uint64_t group_order = 0;
};

/// `seed` selects the randomized Schreier-Sims variant for the action.
ClassifyGroupInfo classify_group(const FiniteField& f, ClassifyGroup which,
                                 std::optional<std::uint64_t> seed = std::nullopt);

struct OvoidClass {
  PointSet representative;  // flag indices of H(q,1)
  std::uint64_t orbit_size = 0;
  std::uint64_t stabilizer_order = 0;
  OrbitLengths point_orbit_lengths;
  OrbitLengths line_orbit_lengths;
};

nlohmann::json to_json(const OvoidClass& c);
OvoidClass ovoid_class_from_json(const nlohmann::json& j);

struct Classification {
  int q = 0;
  ClassifyGroup group = ClassifyGroup::subhex_stabilizer;
  std::uint64_t group_order = 0;
  std::uint64_t total_matchings = 0;
  std::uint64_t matchings_examined = 0;
  std::vector<OvoidClass> classes;  // sorted by representative
  double seconds = 0;
};

nlohmann::json to_json(const Classification& c);
Classification classification_from_json(const nlohmann::json& j);
void save_classification(const Classification& c, const std::filesystem::path& path);
/// Reads a classification file, or a bare array of classes (then q and the
/// group are inferred from the representative size and left at the default).
Classification load_classification(const std::filesystem::path& path);

struct ClassifyOptions {
  ClassifyGroup group = ClassifyGroup::subhex_stabilizer;
  /// Required for q = 4.
  bool long_run = false;
  /// One JSON class per line, appended as classes are found; classes already
  /// there are reused on restart.
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::uint64_t> seed;
  std::function<void(const Classification&)> progress;
};

/// Counts the perfect matchings of PG(2,q) with Ryser's formula, then walks
/// them, canonicalizes each by smallest_image_set and records every new class
/// with its orbit, until the orbits account for every matching. Throws
/// InternalError if the matchings run out first or an orbit overshoots.
Classification classify_ovoids(int q, const ClassifyOptions& opts = {});

/// Checks the class invariants: representative size q^2+q+1, a perfect
/// matching, a fixed point of smallest_image_set, orbit sums matching
/// stabilizer orders, and the orbit sizes adding up to the matching count.
/// Returns a description of the first failure.
std::optional<std::string> verify_classification(const Classification& c);

/// H(q)^D with one embedded H(q,1): the closure of line 0 and the first
/// line opposite it, and an isomorphism from the flag hexagon onto it.
struct ExtensionContext {
  int q = 0;
  Geometry hexagon;
  nlohmann::json manifest;
  Geometry flag_hexagon;
  SubHex subhexagon;
  Embedding embedding;
  HittingInstance instance;  // distance-2 ovoids of the hexagon
};

ExtensionContext prepare_extension(int q);

/// Stable 64-bit hash (hex) of the hexagon's manifest and incidence.
std::string manifest_hash(const ExtensionContext& ctx);

enum class ExtensionStatus { infeasible, feasible, budget_exceeded };

std::string to_string(ExtensionStatus s);

struct ExtensionResult {
  PointSet representative;
  ExtensionStatus status = ExtensionStatus::infeasible;
  std::optional<PointSet> witness;  // an ovoid of the hexagon, if feasible
  std::uint64_t nodes_expanded = 0;
  double seconds = 0;
};

/// Forces the embedded representative and searches for a distance-2 ovoid
/// of the hexagon containing it. Throws DomainError if the representative
/// does not have q^2+q+1 points.
ExtensionResult extend_class(const ExtensionContext& ctx, const OvoidClass& c,
                             std::optional<std::uint64_t> max_nodes = std::nullopt);

/// extend_class over all classes on `jobs` threads, in class order.
std::vector<ExtensionResult> extend_classes(const ExtensionContext& ctx, const std::vector<OvoidClass>& classes,
                                            std::optional<std::uint64_t> max_nodes, unsigned jobs);

enum class Verdict { established, refuted, inconclusive };

std::string to_string(Verdict v);

struct ProofOptions {
  std::optional<std::uint64_t> max_nodes_per_class;
  std::optional<std::uint64_t> max_nodes_direct;
  /// Classes to use instead of running the classification.
  std::optional<Classification> classes;
  bool long_run = false;
  /// Also search without forcing (q = 2 only).
  bool direct = true;
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
};

struct ProofReport {
  int q = 0;
  std::uint64_t total_matchings = 0;
  std::size_t num_classes = 0;
  ClassifyGroup group = ClassifyGroup::subhex_stabilizer;
  std::vector<ExtensionResult> classes;
  /// Search for an ovoid without forcing (q = 2 only).
  std::optional<SolveOutcome> direct;
  /// established: no distance-2 ovoid; refuted: one was found.
  Verdict verdict = Verdict::inconclusive;
  std::string manifest_hash;
  std::optional<std::uint64_t> max_nodes_per_class;
  std::optional<std::uint64_t> max_nodes_direct;
  std::optional<std::uint64_t> seed;
  double classify_seconds = 0;
  double extend_seconds = 0;
  double direct_seconds = 0;
  std::optional<std::string> note;
};

nlohmann::json to_json(const ProofReport& r);

/// Non-existence of distance-2 ovoids of H(q)^D, q in {2, 4}. For q = 2 the
/// unforced search runs as well and both routes must agree. For q = 4
/// without opts.classes or opts.long_run nothing is extended and the verdict
/// is inconclusive.
ProofReport prove_nonexistence(int q, const ProofOptions& opts = {});

/// Double count of (point of O, subhexagon through it) for a partial ovoid O
/// meeting no subhexagon in q^2+q+1 points.
struct CountingIngredients {
  std::uint64_t subhexagons = 0;            // q^3(1+q)(q^2-q+1)/2
  std::uint64_t subhexagons_per_point = 0;  // (1+q)q^3/2
  std::uint64_t max_per_subhexagon = 0;     // q^2+q
  std::uint64_t bound = 0;                  // (q^2-q+1)(q^2+q)
};

CountingIngredients counting_ingredients(int q);
std::uint64_t counting_bound(int q);

struct ClassBound {
  PointSet representative;
  PackingOutcome outcome;
  double seconds = 0;
};

struct PartialBoundReport {
  int q = 0;
  std::uint64_t b = 0;
  std::uint64_t counting_bound = 0;
  std::vector<ClassBound> classes;
  /// A largest partial ovoid without forcing, when requested.
  std::optional<PackingOutcome> unrestricted;
  /// established: every partial distance-2 ovoid has at most b points.
  Verdict verdict = Verdict::inconclusive;
  std::optional<std::uint64_t> max_nodes_per_class;
  double seconds = 0;
  std::optional<std::string> note;
};

nlohmann::json to_json(const PartialBoundReport& r);

struct PartialBoundOptions {
  std::optional<std::uint64_t> max_nodes_per_class;
  std::optional<Classification> classes;
  bool long_run = false;
  /// Also run max_packing without forcing (feasible for q = 2).
  bool unrestricted = false;
  std::optional<std::uint64_t> max_nodes_unrestricted;
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
};

/// Partial distance-2 ovoids of H(q)^D have at most b points: either no
/// subhexagon meets O in q^2+q+1 points and the counting bound applies, or
/// one does, and then O contains an embedded class, so a packing larger than
/// b with that class forced must not exist. Throws ConfigError if b is below
/// the counting bound. Classes are obtained as for prove_nonexistence.
PartialBoundReport partial_bound(int q, std::uint64_t b, const PartialBoundOptions& opts = {});

struct TableRow {
  std::uint64_t stabilizer_order = 0;
  std::uint64_t count = 0;
  OrbitLengths point_orbit_lengths;
  OrbitLengths line_orbit_lengths;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

/// Classes grouped by stabilizer order and orbit lengths, largest
/// stabilizers first.
std::vector<TableRow> class_table(const std::vector<OvoidClass>& classes);

nlohmann::json to_json(const TableRow& r);

}  // namespace ovoid
