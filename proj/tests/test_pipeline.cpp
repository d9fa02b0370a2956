#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ovoid/errors.hpp"
#include "ovoid/pipeline.hpp"

using namespace ovoid;

namespace {

const Classification& classes_q2() {
  static const Classification c = classify_ovoids(2);
  return c;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ovoid_test_" + name);
}

}  // namespace

TEST_CASE("orbit length formatting") {
  const std::vector<PointSet> orbits{{0, 1, 2}, {3}, {4, 5, 6}, {7}, {8, 9}};
  const auto l = orbit_length_multiset(orbits);
  CHECK(l == OrbitLengths{{3, 2}, {2, 1}, {1, 2}});
  CHECK(format_orbit_lengths(l) == "3^2 2^1 1^2");
  CHECK(parse_classify_group("full") == ClassifyGroup::full);
  CHECK(to_string(ClassifyGroup::subhex_stabilizer) == "subhex-stabilizer");
  CHECK_THROWS_AS(parse_classify_group("whole"), ConfigError);
}

TEST_CASE("classification for q = 2") {
  const auto& c = classes_q2();
  CHECK(c.q == 2);
  CHECK(c.total_matchings == 24);
  CHECK(c.group_order == 336);
  REQUIRE(c.classes.size() == 1);
  const auto& k = c.classes[0];
  CHECK(k.representative.size() == 7);
  CHECK(k.orbit_size == 24);
  CHECK(k.stabilizer_order == 14);
  CHECK(k.point_orbit_lengths == OrbitLengths{{7, 3}});
  CHECK(k.line_orbit_lengths == OrbitLengths{{14, 1}});
  CHECK_FALSE(verify_classification(c).has_value());

  ClassifyOptions full;
  full.group = ClassifyGroup::full;
  const auto f = classify_ovoids(2, full);
  CHECK(f.classes.size() == 1);
  CHECK(f.classes[0].representative == k.representative);
}

TEST_CASE("verification catches tampering") {
  auto c = classes_q2();
  c.classes[0].orbit_size = 23;
  CHECK(verify_classification(c).has_value());
  c = classes_q2();
  c.classes[0].representative.pop_back();
  CHECK(verify_classification(c).has_value());
  c = classes_q2();
  c.classes.push_back(c.classes[0]);
  CHECK(verify_classification(c).has_value());
  c = classes_q2();
  c.classes[0].representative.back() -= 1;
  CHECK(verify_classification(c).has_value());
}

TEST_CASE("classification files") {
  const auto& c = classes_q2();
  const auto path = temp_path("classes.json");
  save_classification(c, path);
  const auto back = load_classification(path);
  CHECK(back.q == 2);
  CHECK(back.classes.size() == 1);
  CHECK(back.classes[0].representative == c.classes[0].representative);
  CHECK(back.classes[0].point_orbit_lengths == c.classes[0].point_orbit_lengths);
  CHECK_FALSE(verify_classification(back).has_value());

  // A bare array of classes.
  {
    std::ofstream out(path);
    out << nlohmann::json::array({to_json(c.classes[0])}).dump();
  }
  const auto bare = load_classification(path);
  CHECK(bare.q == 2);
  CHECK_FALSE(verify_classification(bare).has_value());

  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_classification(path), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("checkpointed classification resumes") {
  const auto path = temp_path("ckpt.jsonl");
  std::filesystem::remove(path);
  ClassifyOptions o;
  o.checkpoint = path;
  const auto first = classify_ovoids(2, o);
  CHECK(std::filesystem::file_size(path) > 0);
  const auto second = classify_ovoids(2, o);
  CHECK(second.classes.size() == first.classes.size());
  CHECK(second.classes[0].representative == first.classes[0].representative);
  std::filesystem::remove(path);
}

TEST_CASE("non-existence for q = 2 by both routes") {
  const auto r = prove_nonexistence(2);
  CHECK(r.verdict == Verdict::established);
  CHECK(r.num_classes == 1);
  REQUIRE(r.classes.size() == 1);
  CHECK(r.classes[0].status == ExtensionStatus::infeasible);
  CHECK_FALSE(r.classes[0].witness.has_value());
  REQUIRE(r.direct.has_value());
  CHECK(r.direct->status == SolveStatus::exhausted_no_solution);
  CHECK(r.manifest_hash.size() == 16);
  const auto j = to_json(r);
  CHECK(j["verdict"] == "established");

  ProofOptions tight;
  tight.max_nodes_per_class = 1;
  tight.direct = false;
  const auto t = prove_nonexistence(2, tight);
  CHECK(t.classes[0].status == ExtensionStatus::budget_exceeded);
  CHECK(t.verdict == Verdict::inconclusive);
}

TEST_CASE("extension context") {
  const auto ctx = prepare_extension(2);
  CHECK(ctx.instance.blocks.size() == 63);
  CHECK(ctx.subhexagon.point_ids.size() == 21);
  CHECK(manifest_hash(ctx) == manifest_hash(prepare_extension(2)));
  OvoidClass bad;
  bad.representative = {0, 1};
  CHECK_THROWS_AS(extend_class(ctx, bad), DomainError);
  CHECK_THROWS_AS(prepare_extension(3), ConfigError);
}

TEST_CASE("q = 4 without classes is inconclusive") {
  ProofOptions o;
  o.max_nodes_per_class = 10;
  const auto r = prove_nonexistence(4, o);
  CHECK(r.verdict == Verdict::inconclusive);
  CHECK(r.note.has_value());
  CHECK(r.classes.empty());
  CHECK_THROWS_AS(classify_ovoids(4), ConfigError);
}

TEST_CASE("counting bounds") {
  CHECK(counting_bound(2) == 18);
  CHECK(counting_bound(3) == 84);
  CHECK(counting_bound(4) == 260);
  const auto c = counting_ingredients(4);
  CHECK(c.subhexagons == 2080);
  CHECK(c.subhexagons_per_point == 160);
  CHECK(c.max_per_subhexagon == 20);
}

TEST_CASE("partial ovoid bound for q = 2") {
  PartialBoundOptions o;
  o.unrestricted = true;
  const auto r = partial_bound(2, 19, o);
  CHECK(r.verdict == Verdict::established);
  REQUIRE(r.unrestricted.has_value());
  CHECK(r.unrestricted->best.size() == 19);
  REQUIRE(r.classes.size() == 1);
  CHECK(r.classes[0].outcome.status == PackingStatus::bound_established);

  const auto low = partial_bound(2, 18, o);
  CHECK(low.verdict == Verdict::refuted);
  CHECK_THROWS_AS(partial_bound(2, 17), ConfigError);
  CHECK(to_json(r)["verdict"] == "established");
}

TEST_CASE("class table") {
  const auto rows = class_table(classes_q2().classes);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].stabilizer_order == 14);
  CHECK(rows[0].count == 1);
  OvoidClass a, b, c;
  a.stabilizer_order = 6;
  a.point_orbit_lengths = {{3, 7}};
  b = a;
  c.stabilizer_order = 12;
  c.point_orbit_lengths = {{6, 3}, {3, 1}};
  const auto t = class_table({a, c, b});
  REQUIRE(t.size() == 2);
  CHECK(t[0].stabilizer_order == 12);
  CHECK(t[1].count == 2);
  CHECK(to_json(t[1])["count"] == 2);
}
