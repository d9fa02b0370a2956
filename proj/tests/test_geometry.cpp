#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "ovoid/constructions.hpp"
#include "ovoid/errors.hpp"
#include "ovoid/geometry.hpp"

using namespace ovoid;

namespace {

Geometry fano() { return build_pg2(make_field(2)); }

// Number of violations of delta = 2d, 2d+1, 2d+2 over the given pairs.
int metric_violations(const Geometry& g, Vertex a, Vertex b) {
  const auto dl = delta(g, a, b);
  if (!dl) return 1;
  if (g.is_point(a) && g.is_point(b)) {
    const auto d = point_dist(g, g.as_point(a), g.as_point(b));
    return d && *dl == 2 * *d ? 0 : 1;
  }
  if (g.is_point(a) != g.is_point(b)) {
    const auto p = g.is_point(a) ? g.as_point(a) : g.as_point(b);
    const auto l = g.is_point(a) ? g.as_line(b) : g.as_line(a);
    const auto d = point_dist(g, p, l);
    return d && *dl == 2 * *d + 1 ? 0 : 1;
  }
  if (a == b) return 0;
  const auto d = point_dist(g, g.as_line(a), g.as_line(b));
  return d && *dl == 2 * *d + 2 ? 0 : 1;
}

}  // namespace

TEST_CASE("geometry rejects malformed lines") {
  CHECK_THROWS_AS(Geometry("bad", 3, {{0, 3}}), DomainError);
  CHECK_THROWS_AS(Geometry("bad", 3, {{1, 0}}), DomainError);
  CHECK_THROWS_AS(Geometry("bad", 3, {{1, 1}}), DomainError);
}

TEST_CASE("incidence distances on small examples") {
  const auto g = fano();
  const auto l = LineId{0};
  const auto x = PointId{g.points_on(l)[0]};
  const auto y = PointId{g.points_on(l)[1]};
  CHECK(delta(g, g.vertex(x), g.vertex(l)) == 1);
  CHECK(delta(g, g.vertex(x), g.vertex(y)) == 2);
  CHECK(delta(g, g.vertex(x), g.vertex(x)) == 0);
  CHECK(point_dist(g, x, y) == 1);
  CHECK(point_dist(g, x, l) == 0);
  CHECK_THROWS_AS(point_dist(g, l, l), DomainError);
}

TEST_CASE("unreachable pairs are reported as empty distances") {
  const Geometry g("two components", 4, {{0, 1}, {2, 3}});
  CHECK_FALSE(delta(g, 0, 2).has_value());
  CHECK_FALSE(point_dist(g, PointId{0}, PointId{3}).has_value());
  CHECK(delta(g, 0, 1) == 2);
  CHECK_FALSE(validate_gp(g, 3).is_valid);
}

TEST_CASE("balls") {
  const auto h2 = build_dual_split_cayley(make_field(2));
  CHECK(ball(h2, PointId{5}, 0) == PointSet{5});
  CHECK(ball(h2, PointId{0}, 1).size() == 7);
  CHECK(ball(h2, LineId{3}, 0) == h2.points_on(LineId{3}));
  const auto h4 = build_dual_split_cayley(make_field(4));
  CHECK(ball(h4, LineId{0}, 0).size() == 5);
}

TEST_CASE("H(2)^D: point-line distances are odd and at most 5") {
  const auto h = build_dual_split_cayley(make_field(2));
  int bad = 0;
  for (std::uint32_t x = 0; x < h.num_points(); ++x)
    for (std::uint32_t l = 0; l < h.num_lines(); ++l) {
      const auto d = delta(h, h.vertex(PointId{x}), h.vertex(LineId{l}));
      if (!d || *d % 2 == 0 || *d > 5) ++bad;
    }
  CHECK(bad == 0);
}

TEST_CASE("distance identities hold on every vertex pair of H(2)^D") {
  const auto h = build_dual_split_cayley(make_field(2));
  int bad = 0;
  for (Vertex a = 0; a < h.num_vertices(); ++a)
    for (Vertex b = 0; b < h.num_vertices(); ++b) bad += metric_violations(h, a, b);
  CHECK(bad == 0);
}

TEST_CASE("distance identities hold on random pairs of H(4)^D") {
  const auto h = build_dual_split_cayley(make_field(4));
  std::mt19937 rng(11);
  std::uniform_int_distribution<Vertex> v(0, static_cast<Vertex>(h.num_vertices() - 1));
  int bad = 0;
  for (int i = 0; i < 2000; ++i) bad += metric_violations(h, v(rng), v(rng));
  CHECK(bad == 0);
}

TEST_CASE("validator on projective planes and hexagons") {
  const auto r = validate_gp(fano(), 3);
  CHECK(r.is_valid);
  CHECK(r.s == 2);
  CHECK(r.t == 2);
  CHECK(r.girth == 6);
  CHECK(validate_gp(build_pg2(make_field(4)), 3).is_valid);
  const auto h = validate_gp(build_dual_split_cayley(make_field(2)), 6);
  CHECK(h.is_valid);
  CHECK(h.s == 2);
  CHECK(h.t == 2);
  CHECK(h.diameter == 6);
  CHECK(h.axiom1_ok == true);
  CHECK(h.axiom2_ok == true);
  CHECK_FALSE(validate_gp(fano(), 6).is_valid);
  CHECK(girth(build_dual_split_cayley(make_field(2))) == 12);
}

TEST_CASE("validator reports a witness when an incidence is deleted") {
  const auto h = build_dual_split_cayley(make_field(2));
  auto lines = h.lines();
  lines[0].erase(lines[0].begin());
  const auto r = validate_gp(Geometry("broken", h.num_points(), lines), 6);
  CHECK_FALSE(r.is_valid);
  CHECK_FALSE(r.regular);
  CHECK_FALSE(r.failure.empty());
}

TEST_CASE("duality") {
  const auto pg = build_pg2(make_field(4));
  const auto back = dualize(dualize(pg));
  CHECK(back.lines() == pg.lines());
  CHECK(back.num_points() == pg.num_points());

  const auto flag = build_flag_hexagon(make_field(2));
  const auto r = validate_gp(dualize(flag), 6);
  CHECK(r.is_valid);
  CHECK(r.s == 1);
  CHECK(r.t == 2);

  // The point graph of H(2,1)^D is the incidence graph of PG(2,2): the dual's
  // points are the 14 elements of the plane, joined when incident.
  const auto dual = dualize(flag);
  const auto fano_g = fano();
  int mismatches = 0;
  for (std::uint32_t a = 0; a < dual.num_points(); ++a)
    for (std::uint32_t b = 0; b < dual.num_points(); ++b) {
      const bool adjacent = point_dist(dual, PointId{a}, PointId{b}) == 1;
      const auto va = a < 7 ? fano_g.vertex(PointId{a}) : fano_g.vertex(LineId{a - 7});
      const auto vb = b < 7 ? fano_g.vertex(PointId{b}) : fano_g.vertex(LineId{b - 7});
      if (adjacent != (delta(fano_g, va, vb) == 1)) ++mismatches;
    }
  CHECK(mismatches == 0);
}

TEST_CASE("geometry files round trip and reject bad input") {
  const auto dir = std::filesystem::temp_directory_path() / "ovoid_geometry_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "fano.json";
  save_geometry(fano(), path);
  const auto g = load_geometry(path);
  CHECK(g.lines() == fano().lines());
  CHECK(g.name() == fano().name());

  CHECK_THROWS_AS(parse_geometry("{not json"), ParseError);
  CHECK_THROWS_AS(parse_geometry(R"({"format_version": 2, "name": "x", "num_points": 2, "lines": [[0, 1]]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_geometry(R"({"format_version": 1, "name": "x", "num_points": 2, "lines": [[0, 2]]})"),
                  ParseError);
  try {
    parse_geometry("{\"format_version\": 1, \"name\": \"x\", \"num_points\": 3,\n \"lines\": [\n  [0, 1],\n  [2, 2]\n ]}");
    FAIL("duplicate point accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS(load_geometry(dir / "missing.json"));
  std::filesystem::remove_all(dir);
}
