#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ovoid/constructions.hpp"
#include "ovoid/errors.hpp"
#include "ovoid/perm_group.hpp"

using namespace ovoid;

namespace {

Perm cycle(std::size_t n, std::vector<std::uint32_t> c) {
  std::vector<std::uint32_t> img(n);
  std::iota(img.begin(), img.end(), 0u);
  for (std::size_t k = 0; k < c.size(); ++k) img[c[k]] = c[(k + 1) % c.size()];
  return Perm(img);
}

PermGroup symmetric(std::size_t n) {
  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0u);
  return PermGroup(n, {cycle(n, {0, 1}), cycle(n, all)});
}

// Every element of a small group, by closure under the generators.
std::vector<Perm> elements(const PermGroup& g) {
  std::set<std::vector<std::uint32_t>> seen;
  std::vector<Perm> out{Perm::identity(g.degree())};
  seen.insert(std::vector<std::uint32_t>(out[0].images().begin(), out[0].images().end()));
  for (std::size_t k = 0; k < out.size(); ++k)
    for (const auto& s : g.generators()) {
      Perm h = s * out[k];
      std::vector<std::uint32_t> key(h.images().begin(), h.images().end());
      if (seen.insert(key).second) out.push_back(h);
    }
  return out;
}

PointSet random_set(std::mt19937_64& rng, std::size_t n) {
  PointSet s;
  for (std::uint32_t x = 0; x < n; ++x)
    if (rng() % 3 == 0) s.push_back(x);
  return s;
}

}  // namespace

TEST_CASE("perm basics") {
  CHECK_THROWS_AS(Perm({0, 0, 1}), DomainError);
  CHECK_THROWS_AS(Perm({0, 3, 1}), DomainError);
  const Perm a = cycle(4, {0, 1, 2});
  const Perm b = cycle(4, {2, 3});
  CHECK((a * b)(2) == a(b(2)));
  CHECK((a * b)(2) == 3);
  CHECK((b * a)(2) == 0);
  CHECK((a * a.inverse()).is_identity());
  CHECK(a.apply(PointSet{0, 3}) == PointSet{1, 3});
}

TEST_CASE("orbits and orders of small groups") {
  const PermGroup c4(6, {cycle(6, {0, 1, 2, 3})});
  CHECK(c4.order() == 4);
  CHECK(orbit(c4, 2) == PointSet{0, 1, 2, 3});
  CHECK(orbit(c4, 5) == PointSet{5});
  CHECK(orbits(6, c4.generators()) == std::vector<PointSet>{{0, 1, 2, 3}, {4}, {5}});
  CHECK(symmetric(5).order() == 120);
  CHECK(PermGroup(3, {}).order() == 1);
  CHECK(symmetric(12).order() == 479001600);
  CHECK(symmetric(5).contains(cycle(5, {1, 4})));
  CHECK_FALSE(c4.contains(cycle(6, {0, 1})));
}

TEST_CASE("automorphism groups of flag hexagons") {
  const auto f2 = make_field(2), f4 = make_field(4);
  const auto g2 = build_aut_flag_hexagon(f2);
  CHECK(g2.order() == 336);
  CHECK(aut_flag_hexagon_order(2, 1) == 336);
  CHECK(build_subhexagon_stabilizer_action(f2).order() == 336);
  const auto g4 = build_aut_flag_hexagon(f4);
  CHECK(g4.order() == 241920);
  CHECK(aut_flag_hexagon_order(2, 2) == 241920);
  const auto s4 = build_subhexagon_stabilizer_action(f4);
  CHECK(s4.order() == 80640);
  CHECK(subhexagon_stabilizer_kernel(4) == 3);
  CHECK(subhexagon_stabilizer_kernel(2) == 1);
  CHECK(build_aut_flag_hexagon(make_field(3)).order() == aut_flag_hexagon_order(3, 1));

  const auto h4 = build_flag_hexagon(f4);
  for (const auto& s : g4.generators()) CHECK(is_automorphism(h4, s));
  // Points and lines are separate orbits, as the group preserves the type.
  CHECK(orbit(g4, 0).size() == 105);
  CHECK(orbit(g4, 105).size() == 42);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) CHECK(is_automorphism(h4, g4.random_element(rng)));
  // A transposition of two points is not.
  CHECK_FALSE(is_automorphism(h4, cycle(147, {0, 1})));
}

TEST_CASE("set orbits and stabilizers") {
  const auto g = build_aut_flag_hexagon(make_field(2));
  PointSet all(g.degree());
  std::iota(all.begin(), all.end(), 0u);
  auto r = set_orbit_with_stabilizer(g, all);
  CHECK(r.orbit_size == 1);
  CHECK(r.stabilizer_order == 336);
  r = set_orbit_with_stabilizer(g, PointSet{0});
  CHECK(r.orbit_size == 21);
  CHECK(r.stabilizer_order == 16);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 30; ++k) {
    const auto s = random_set(rng, g.degree());
    r = set_orbit_with_stabilizer(g, s);
    CHECK(r.orbit_size * r.stabilizer_order == 336);
    for (const auto& h : r.stabilizer_generators) CHECK(h.apply(s) == s);
  }
  CHECK_THROWS_AS(set_orbit_with_stabilizer(g, PointSet{0}, 5), ResourceError);
}

TEST_CASE("smallest image agrees with brute force") {
  std::vector<PermGroup> groups;
  groups.push_back(build_aut_flag_hexagon(make_field(2)));
  // S4 x S4 on a 4 x 4 grid, with the transpose.
  std::vector<std::uint32_t> tr(16);
  for (std::uint32_t k = 0; k < 16; ++k) tr[k] = (k % 4) * 4 + k / 4;
  groups.push_back(PermGroup(16, {cycle(16, {0, 1}) * cycle(16, {4, 5}) * cycle(16, {8, 9}) * cycle(16, {12, 13}),
                                  cycle(16, {0, 1, 2, 3}) * cycle(16, {4, 5, 6, 7}) * cycle(16, {8, 9, 10, 11}) *
                                      cycle(16, {12, 13, 14, 15}),
                                  Perm(tr)}));
  // The dihedral group of order 24.
  std::vector<std::uint32_t> refl(12);
  for (std::uint32_t k = 0; k < 12; ++k) refl[k] = (12 - k) % 12;
  groups.push_back(PermGroup(12, {cycle(12, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}), Perm(refl)}));
  std::mt19937_64 rng(17);
  for (const auto& g : groups) {
    const auto all = elements(g);
    CHECK(all.size() == g.order());
    for (int k = 0; k < 1000; ++k) {
      const auto s = random_set(rng, g.degree());
      PointSet best = s;
      for (const auto& h : all) best = std::min(best, h.apply(s));
      const auto canon = smallest_image_set(g, s);
      CHECK(canon == best);
      CHECK(smallest_image_chain(g, s) == best);
      // Constant on orbits and idempotent.
      const auto h = all[rng() % all.size()];
      CHECK(smallest_image_set(g, h.apply(s)) == canon);
      CHECK(smallest_image_set(g, canon) == canon);
    }
  }
}

TEST_CASE("smallest image in large groups") {
  const auto s12 = symmetric(12);
  CHECK(smallest_image_set(s12, PointSet{3, 7, 11}) == PointSet{0, 1, 2});
  CHECK(smallest_image_chain(s12, PointSet{3, 7, 11}) == PointSet{0, 1, 2});
  const auto s6 = symmetric(6);
  CHECK(smallest_image_set(s6, PointSet{1, 4, 5}) == PointSet{0, 1, 2});
  CHECK(smallest_image_set(s6, PointSet{}).empty());
  CHECK(smallest_image_set(PermGroup(4, {}), PointSet{1, 3}) == PointSet{1, 3});
  CHECK_THROWS_AS(smallest_image_set(s6, PointSet{6}), DomainError);

  const auto g = build_aut_flag_hexagon(make_field(4));
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    PointSet s;
    for (std::uint32_t x = 0; x < 105; ++x)
      if (rng() % 5 == 0) s.push_back(x);
    const auto canon = smallest_image_set(g, s);
    CHECK(canon.size() == s.size());
    CHECK(canon <= s);
    CHECK(smallest_image_chain(g, s) == canon);
    CHECK(smallest_image_set(g, g.random_element(rng).apply(s)) == canon);
  }
}

TEST_CASE("group JSON round trip") {
  const auto g = build_aut_flag_hexagon(make_field(2));
  const auto back = PermGroup::from_json(g.to_json());
  CHECK(back.degree() == g.degree());
  CHECK(back.generators() == g.generators());
  CHECK(back.order() == 336);
}

TEST_CASE("randomized chain gives the same group") {
  const auto f = make_field(4);
  const auto g = build_subhexagon_stabilizer_action(f);
  const PermGroup r(g.degree(), g.generators(), 99);
  CHECK(r.order() == 80640);
  std::mt19937_64 rng(1);
  PointSet s{0, 4, 9, 30, 77, 104};
  CHECK(smallest_image_set(r, s) == smallest_image_set(g, s));
}
