#pragma once

// Permutation groups acting on {0, ..., n-1}.
//
// Composition is functional: (a * b)(x) = a(b(x)). The stabilizer chain uses
// the full base 0, 1, ..., n-1, so level i is the pointwise stabilizer of
// {0, ..., i-1}; most levels are trivial. That alignment with the natural
// order of points is what smallest_image_set relies on.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ovoid/field.hpp"
#include "ovoid/geometry.hpp"

namespace ovoid {

class Perm {
 public:
  /// Throws DomainError unless `images` is a bijection on {0..n-1}.
  explicit Perm(std::vector<std::uint32_t> images);
  static Perm identity(std::size_t n);

  std::size_t degree() const { return images_.size(); }
  std::uint32_t operator()(std::uint32_t x) const { return images_[x]; }
  std::span<const std::uint32_t> images() const { return images_; }
  bool is_identity() const;
  Perm inverse() const;

  /// Image of a point set, sorted.
  PointSet apply(std::span<const std::uint32_t> set) const;

  friend Perm operator*(const Perm& a, const Perm& b);
  friend bool operator==(const Perm&, const Perm&) = default;

 private:
  struct Unchecked {};
  Perm(std::vector<std::uint32_t> images, Unchecked) : images_(std::move(images)) {}
  std::vector<std::uint32_t> images_;
};

/// One nontrivial level of the stabilizer chain.
struct ChainLevel {
  std::uint32_t base_point;
  std::vector<std::uint32_t> orbit;           // orbit of base_point, BFS order
  std::vector<std::int32_t> orbit_slot;       // point -> index in orbit, or -1
  std::vector<Perm> transversal;              // transversal[k](base_point) == orbit[k]
  std::vector<Perm> inverse_transversal;
};

struct StabilizerChain {
  std::size_t degree = 0;
  std::vector<Perm> strong_generators;
  std::vector<ChainLevel> levels;  // ascending base points

  /// Product of the level orbit lengths. Throws ResourceError past 2^64.
  std::uint64_t order() const;
  /// Sifts `g`; true iff it lies in the group.
  bool contains(const Perm& g) const;
};

/// Deterministic Schreier-Sims. A seed selects the randomized variant, whose
/// result is then completed by the deterministic pass.
StabilizerChain schreier_sims(std::size_t degree, const std::vector<Perm>& generators,
                              std::optional<std::uint64_t> random_seed = std::nullopt);

struct ElementTable;

class PermGroup {
 public:
  /// `chain_seed` selects the randomized Schreier-Sims variant.
  PermGroup(std::size_t degree, std::vector<Perm> generators,
            std::optional<std::uint64_t> chain_seed = std::nullopt);

  std::size_t degree() const { return degree_; }
  const std::vector<Perm>& generators() const { return generators_; }

  /// The stabilizer chain, built on first use (thread-safe).
  const StabilizerChain& chain() const;
  std::uint64_t order() const { return chain().order(); }
  bool contains(const Perm& g) const { return chain().contains(g); }

  /// A uniformly random element, from the chain.
  template <class Rng>
  Perm random_element(Rng& rng) const;

  nlohmann::json to_json() const;
  static PermGroup from_json(const nlohmann::json& j);

 private:
  friend PointSet smallest_image_set(const PermGroup&, const PointSet&);
  // Every element as an image row, for groups small enough; null otherwise.
  ElementTable* element_table() const;

  struct Lazy;
  std::size_t degree_;
  std::vector<Perm> generators_;
  std::optional<std::uint64_t> chain_seed_;
  std::shared_ptr<Lazy> lazy_;
};

/// Orbit of a point, sorted.
PointSet orbit(const PermGroup& g, std::uint32_t x);

/// Orbits of the group on {0..degree-1}, each sorted, ordered by least element.
std::vector<PointSet> orbits(std::size_t degree, const std::vector<Perm>& generators);

struct SetOrbitResult {
  std::uint64_t orbit_size = 0;
  std::vector<Perm> stabilizer_generators;
  std::uint64_t stabilizer_order = 0;
};

/// Orbit of a point set by BFS over its images, with Schreier generators of
/// the setwise stabilizer sifted until they generate a group of order
/// |G| / orbit size. Throws ResourceError if the orbit exceeds `max_orbit`.
SetOrbitResult set_orbit_with_stabilizer(const PermGroup& g, const PointSet& s,
                                         std::size_t max_orbit = 5'000'000);

/// Lexicographically least sorted set among all images of `s`. Candidate
/// images are refined one point at a time, always fixing the least point
/// still reachable and keeping only candidates that reach it.
PointSet smallest_image_set(const PermGroup& g, const PointSet& s);

/// The same result by backtracking down the fixed-base stabilizer chain,
/// keeping candidates that are best on every point the remaining group fixes.
/// smallest_image_set falls back to it for groups of order above 2^22.
PointSet smallest_image_chain(const PermGroup& g, const PointSet& s);

/// Aut(H(q,1)) = PGammaL(3,q) x| C2 acting on the vertices of
/// build_flag_hexagon (points first, then lines). Generators: the elementary
/// transvections I + c e_ij for c in 1, w, ..., w^(r-1), diag(w,1,1) for a
/// primitive w, the Frobenius map (r > 1) and the standard duality. Each is
/// checked to be an automorphism.
PermGroup build_aut_flag_hexagon(const FiniteField& f);

/// The subgroup generated without the diagonal element: PSigmaL(3,q) x| C2,
/// of index gcd(3, q-1). This is the group induced on an H(q,1) subhexagon by
/// its stabilizer in Aut(H(q)^D), which contains SL(3,q) and hence a kernel of
/// order gcd(3, q-1) (the scalar matrices of SL(3,q)).
PermGroup build_subhexagon_stabilizer_action(const FiniteField& f);

/// gcd(3, q-1).
int subhexagon_stabilizer_kernel(int q);

/// 2r(q^3-1)(q^3-q)(q^3-q^2)/(q-1).
std::uint64_t aut_flag_hexagon_order(int p, int r);

/// True iff `g`, acting on vertices, maps points to points, lines to lines and
/// preserves incidence.
bool is_automorphism(const Geometry& geo, const Perm& g);

template <class Rng>
Perm PermGroup::random_element(Rng& rng) const {
  const auto& c = chain();
  Perm g = Perm::identity(degree_);
  for (const auto& level : c.levels) {
    const auto k = static_cast<std::size_t>(rng() % level.orbit.size());
    g = g * level.transversal[k];
  }
  return g;
}

}  // namespace ovoid
