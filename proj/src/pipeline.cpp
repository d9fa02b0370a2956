#include "ovoid/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>
#include <unordered_set>

#include <boost/container_hash/hash.hpp>

#include "ovoid/errors.hpp"

namespace ovoid {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_q(int q) {
  if (q != 2 && q != 4) throw ConfigError("only q = 2 and q = 4 are supported, got q = " + std::to_string(q));
}

std::uint64_t ovoid_size_h1(int q) { return static_cast<std::uint64_t>(q * q + q + 1); }

nlohmann::json lengths_json(const OrbitLengths& l) {
  auto a = nlohmann::json::array();
  for (const auto& [len, mult] : l) a.push_back({len, mult});
  return a;
}

OrbitLengths lengths_from_json(const nlohmann::json& j) {
  OrbitLengths out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw ParseError("orbit length entries are [length, multiplicity] pairs");
    out.emplace_back(e[0].get<std::uint64_t>(), e[1].get<std::uint64_t>());
  }
  return out;
}

std::uint64_t lengths_total(const OrbitLengths& l) {
  std::uint64_t s = 0;
  for (const auto& [len, mult] : l) s += len * mult;
  return s;
}

nlohmann::json optional_json(const std::optional<std::uint64_t>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

// Runs f(i) for i in [0, n) on up to `jobs` threads.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F f) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  pool.clear();
  if (error) std::rethrow_exception(error);
}

constexpr const char* kNoClasses = "no classes: pass a classification, or allow the long run that computes one";

// Null when q = 4 has neither classes nor the long-run flag.
std::optional<Classification> classes_for(int q, const std::optional<Classification>& given, bool long_run,
                                          std::optional<std::uint64_t> seed) {
  if (given) {
    if (given->q != q) throw ConfigError("classes are for q = " + std::to_string(given->q));
    if (auto bad = verify_classification(*given)) throw ConfigError("classes fail verification: " + *bad);
    return *given;
  }
  if (q == 4 && !long_run) return std::nullopt;
  ClassifyOptions opts;
  opts.long_run = long_run;
  opts.seed = seed;
  return classify_ovoids(q, opts);
}

}  // namespace

// -------------------------------------------------------------- classes

OrbitLengths orbit_length_multiset(const std::vector<PointSet>& orbits) {
  std::map<std::uint64_t, std::uint64_t, std::greater<>> m;
  for (const auto& o : orbits) ++m[o.size()];
  return {m.begin(), m.end()};
}

std::string format_orbit_lengths(const OrbitLengths& l) {
  std::string out;
  for (const auto& [len, mult] : l) {
    if (!out.empty()) out += ' ';
    out += std::to_string(len) + '^' + std::to_string(mult);
  }
  return out;
}

std::string to_string(ClassifyGroup g) {
  return g == ClassifyGroup::full ? "full" : "subhex-stabilizer";
}

ClassifyGroup parse_classify_group(const std::string& s) {
  if (s == "full") return ClassifyGroup::full;
  if (s == "subhex-stabilizer") return ClassifyGroup::subhex_stabilizer;
  throw ConfigError("unknown classification group '" + s + "'");
}

ClassifyGroupInfo classify_group(const FiniteField& f, ClassifyGroup which, std::optional<std::uint64_t> seed) {
  const bool full = which == ClassifyGroup::full;
  const auto built = full ? build_aut_flag_hexagon(f) : build_subhexagon_stabilizer_action(f);
  PermGroup g(built.degree(), built.generators(), seed);
  const std::uint64_t kernel = full ? 1 : static_cast<std::uint64_t>(subhexagon_stabilizer_kernel(f.q()));
  const auto order = g.order() * kernel;
  return {std::move(g), kernel, order};
}

nlohmann::json to_json(const OvoidClass& c) {
  return {{"representative", c.representative},
          {"orbit_size", c.orbit_size},
          {"stabilizer_order", c.stabilizer_order},
          {"point_orbit_lengths", lengths_json(c.point_orbit_lengths)},
          {"line_orbit_lengths", lengths_json(c.line_orbit_lengths)}};
}

OvoidClass ovoid_class_from_json(const nlohmann::json& j) {
  try {
    OvoidClass c;
    c.representative = j.at("representative").get<PointSet>();
    c.orbit_size = j.at("orbit_size").get<std::uint64_t>();
    c.stabilizer_order = j.at("stabilizer_order").get<std::uint64_t>();
    c.point_orbit_lengths = lengths_from_json(j.at("point_orbit_lengths"));
    c.line_orbit_lengths = lengths_from_json(j.at("line_orbit_lengths"));
    if (!std::is_sorted(c.representative.begin(), c.representative.end()))
      throw ParseError("class representative is not sorted");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad class entry: ") + e.what());
  }
}

nlohmann::json to_json(const Classification& c) {
  auto classes = nlohmann::json::array();
  for (const auto& k : c.classes) classes.push_back(to_json(k));
  return {{"format_version", 1},
          {"tool_version", kToolVersion},
          {"q", c.q},
          {"group", to_string(c.group)},
          {"group_order", c.group_order},
          {"total_matchings", c.total_matchings},
          {"matchings_examined", c.matchings_examined},
          {"seconds", c.seconds},
          {"classes", classes}};
}

Classification classification_from_json(const nlohmann::json& j) {
  Classification c;
  const nlohmann::json* arr = &j;
  try {
    if (j.is_object()) {
      if (j.value("format_version", 1) != 1) throw ParseError("unsupported classes format_version");
      c.q = j.at("q").get<int>();
      c.group = parse_classify_group(j.value("group", std::string("subhex-stabilizer")));
      c.group_order = j.value("group_order", std::uint64_t{0});
      c.total_matchings = j.value("total_matchings", std::uint64_t{0});
      c.matchings_examined = j.value("matchings_examined", std::uint64_t{0});
      c.seconds = j.value("seconds", 0.0);
      arr = &j.at("classes");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad classes file: ") + e.what());
  }
  if (!arr->is_array()) throw ParseError("classes must be an array");
  for (const auto& e : *arr) c.classes.push_back(ovoid_class_from_json(e));
  if (c.q == 0 && !c.classes.empty()) {
    const auto n = c.classes.front().representative.size();
    for (int q : {2, 3, 4})
      if (n == ovoid_size_h1(q)) c.q = q;
    if (c.q == 0) throw ParseError("cannot infer q from a representative of size " + std::to_string(n));
  }
  std::sort(c.classes.begin(), c.classes.end(),
            [](const OvoidClass& a, const OvoidClass& b) { return a.representative < b.representative; });
  return c;
}

void save_classification(const Classification& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot write " + path.string());
  out << to_json(c).dump(1) << '\n';
  if (!out) throw ResourceError("write failed: " + path.string());
}

Classification load_classification(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return classification_from_json(j);
}

// -------------------------------------------------------- classification

Classification classify_ovoids(int q, const ClassifyOptions& opts) {
  check_q(q);
  if (q == 4 && !opts.long_run) throw ConfigError("classifying for q = 4 is a long run and needs the long-run flag");
  const auto t0 = Clock::now();
  const auto f = make_field(q);
  const auto pg = build_pg2(f);
  const auto flag = build_flag_hexagon(f);
  const auto info = classify_group(f, opts.group, opts.seed);

  Classification out;
  out.q = q;
  out.group = opts.group;
  out.group_order = info.group_order;
  out.total_matchings = permanent_ryser(incidence_matrix(pg)).convert_to<std::uint64_t>();

  std::uint64_t b = out.total_matchings;
  std::unordered_set<PointSet, boost::hash<PointSet>> seen;

  const auto accept = [&](OvoidClass c) {
    if (c.orbit_size > b) throw InternalError("class orbits add up to more than the number of matchings");
    b -= c.orbit_size;
    seen.insert(c.representative);
    out.classes.push_back(std::move(c));
  };

  std::ofstream checkpoint;
  if (opts.checkpoint) {
    if (std::filesystem::exists(*opts.checkpoint)) {
      std::ifstream in(*opts.checkpoint);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
          break;  // torn last line of an interrupted run
        }
        auto c = ovoid_class_from_json(j);
        if (smallest_image_set(info.action, c.representative) != c.representative)
          throw ConfigError("checkpoint holds a non-canonical representative; was it written for another group?");
        if (!seen.contains(c.representative)) accept(std::move(c));
      }
    }
    checkpoint.open(*opts.checkpoint, std::ios::app);
    if (!checkpoint) throw ResourceError("cannot write checkpoint " + opts.checkpoint->string());
  }

  const auto n_points = static_cast<std::uint32_t>(flag.num_points());
  const auto make_class = [&](const PointSet& canon) {
    const auto r = set_orbit_with_stabilizer(info.action, canon);
    if (info.group_order % r.orbit_size != 0) throw InternalError("orbit size does not divide the group order");
    OvoidClass c;
    c.representative = canon;
    c.orbit_size = r.orbit_size;
    c.stabilizer_order = info.group_order / r.orbit_size;
    std::vector<PointSet> point_orbits, line_orbits;
    for (auto& o : orbits(info.action.degree(), r.stabilizer_generators))
      (o.front() < n_points ? point_orbits : line_orbits).push_back(std::move(o));
    c.point_orbit_lengths = orbit_length_multiset(point_orbits);
    c.line_orbit_lengths = orbit_length_multiset(line_orbits);
    return c;
  };

  if (b > 0) {
    matchings_iterator(pg, [&](const PointSet& m) {
      ++out.matchings_examined;
      auto canon = smallest_image_set(info.action, m);
      if (seen.contains(canon)) return true;
      auto c = make_class(canon);
      if (checkpoint.is_open()) checkpoint << to_json(c).dump() << std::endl;
      accept(std::move(c));
      if (opts.progress) opts.progress(out);
      return b > 0;
    });
  }
  if (b != 0) throw InternalError("matchings ran out with " + std::to_string(b) + " of them in no class");

  std::sort(out.classes.begin(), out.classes.end(),
            [](const OvoidClass& x, const OvoidClass& y) { return x.representative < y.representative; });
  out.seconds = seconds_since(t0);
  return out;
}

std::optional<std::string> verify_classification(const Classification& c) {
  const int q = c.q;
  if (q < 2 || q > 4) return "unsupported q";
  const auto f = make_field(q);
  const auto flag = build_flag_hexagon(f);
  const auto lines = build_hitting_instance(flag, 2);
  const auto info = classify_group(f, c.group);
  const auto total = permanent_ryser(incidence_matrix(build_pg2(f))).convert_to<std::uint64_t>();
  const auto point_total = static_cast<std::uint64_t>(flag.num_points());
  const auto line_total = static_cast<std::uint64_t>(flag.num_lines());

  std::uint64_t sum = 0;
  std::set<PointSet> reps;
  for (const auto& k : c.classes) {
    const std::string tag = "class " + std::to_string(reps.size());
    if (k.representative.size() != ovoid_size_h1(q)) return tag + ": wrong size";
    if (!lines.is_exact_hitting_set(k.representative)) return tag + ": not a perfect matching";
    if (smallest_image_set(info.action, k.representative) != k.representative) return tag + ": not canonical";
    if (k.orbit_size * k.stabilizer_order != info.group_order) return tag + ": orbit and stabilizer disagree";
    if (lengths_total(k.point_orbit_lengths) != point_total) return tag + ": point orbit lengths do not cover H(q,1)";
    if (lengths_total(k.line_orbit_lengths) != line_total) return tag + ": line orbit lengths do not cover H(q,1)";
    if (!reps.insert(k.representative).second) return tag + ": duplicate";
    sum += k.orbit_size;
  }
  if (sum != total)
    return "orbit sizes add up to " + std::to_string(sum) + ", not to the " + std::to_string(total) + " matchings";
  return std::nullopt;
}

// ------------------------------------------------------------- extension

ExtensionContext prepare_extension(int q) {
  check_q(q);
  const auto f = make_field(q);
  auto model = build_dual_split_cayley_model(f);
  auto manifest = model.manifest();
  ExtensionContext ctx{.q = q,
                       .hexagon = std::move(model.geometry),
                       .manifest = std::move(manifest),
                       .flag_hexagon = build_flag_hexagon(f),
                       .subhexagon = {},
                       .embedding = {},
                       .instance = {}};
  ctx.subhexagon = first_subhexagon(ctx.hexagon);
  ctx.embedding = embed_isomorphism(ctx.flag_hexagon, ctx.hexagon, ctx.subhexagon);
  ctx.instance = build_hitting_instance(ctx.hexagon, 2);
  return ctx;
}

std::string manifest_hash(const ExtensionContext& ctx) {
  // FNV-1a over the manifest and the incidence.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  feed(ctx.manifest.dump());
  feed(geometry_to_json(ctx.hexagon));
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

std::string to_string(ExtensionStatus s) {
  switch (s) {
    case ExtensionStatus::infeasible: return "infeasible";
    case ExtensionStatus::feasible: return "feasible";
    case ExtensionStatus::budget_exceeded: return "budget_exceeded";
  }
  return "?";
}

ExtensionResult extend_class(const ExtensionContext& ctx, const OvoidClass& c, std::optional<std::uint64_t> max_nodes) {
  if (c.representative.size() != ovoid_size_h1(ctx.q))
    throw DomainError("an ovoid of H(q,1) has q^2+q+1 = " + std::to_string(ovoid_size_h1(ctx.q)) + " points, got " +
                      std::to_string(c.representative.size()));
  for (auto x : c.representative)
    if (x >= ctx.embedding.point_map.size()) throw DomainError("representative point outside H(q,1)");
  const auto t0 = Clock::now();
  const auto forced = ctx.embedding.map_points(c.representative);
  const auto out = dlx_solve(ctx.instance, forced, {.max_solutions = 1, .max_nodes = max_nodes});

  ExtensionResult r;
  r.representative = c.representative;
  r.nodes_expanded = out.nodes_expanded;
  if (out.status == SolveStatus::solution_found) {
    const auto& w = out.solutions.front();
    const auto s = static_cast<std::uint64_t>(ctx.q);
    if (w.size() != 1 + s * s + s * s * s * s || !ctx.instance.is_exact_hitting_set(w))
      throw InternalError("solver returned an invalid distance-2 ovoid");
    r.status = ExtensionStatus::feasible;
    r.witness = w;
  } else {
    r.status = out.status == SolveStatus::budget_exceeded ? ExtensionStatus::budget_exceeded : ExtensionStatus::infeasible;
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<ExtensionResult> extend_classes(const ExtensionContext& ctx, const std::vector<OvoidClass>& classes,
                                            std::optional<std::uint64_t> max_nodes, unsigned jobs) {
  std::vector<ExtensionResult> out(classes.size());
  parallel_for(classes.size(), jobs, [&](std::size_t i) { out[i] = extend_class(ctx, classes[i], max_nodes); });
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::established: return "established";
    case Verdict::refuted: return "refuted";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

nlohmann::json to_json(const ProofReport& r) {
  auto classes = nlohmann::json::array();
  for (const auto& c : r.classes) {
    nlohmann::json e{{"representative", c.representative},
                     {"status", to_string(c.status)},
                     {"nodes_expanded", c.nodes_expanded},
                     {"seconds", c.seconds}};
    if (c.witness) e["witness"] = *c.witness;
    classes.push_back(std::move(e));
  }
  nlohmann::json j{{"tool_version", kToolVersion},
                   {"q", r.q},
                   {"claim", "no distance-2 ovoid in H(q)^D"},
                   {"verdict", to_string(r.verdict)},
                   {"manifest_hash", r.manifest_hash},
                   {"classification_group", to_string(r.group)},
                   {"total_matchings", r.total_matchings},
                   {"num_classes", r.num_classes},
                   {"budgets",
                    {{"max_nodes_per_class", optional_json(r.max_nodes_per_class)},
                     {"max_nodes_direct", optional_json(r.max_nodes_direct)}}},
                   {"seed", optional_json(r.seed)},
                   {"wall_seconds",
                    {{"classify", r.classify_seconds}, {"extend", r.extend_seconds}, {"direct", r.direct_seconds}}},
                   {"classes", classes}};
  if (r.note) j["note"] = *r.note;
  if (r.direct)
    j["direct"] = {{"status", to_string(r.direct->status)},
                   {"nodes_expanded", r.direct->nodes_expanded},
                   {"solutions", r.direct->solutions}};
  return j;
}

ProofReport prove_nonexistence(int q, const ProofOptions& opts) {
  check_q(q);
  ProofReport r;
  r.q = q;
  r.max_nodes_per_class = opts.max_nodes_per_class;
  r.max_nodes_direct = opts.max_nodes_direct;
  r.seed = opts.seed;
  const auto ctx = prepare_extension(q);
  r.manifest_hash = manifest_hash(ctx);

  auto t0 = Clock::now();
  if (q == 2 && opts.direct) {
    r.direct = dlx_solve(ctx.instance, {}, {.max_solutions = 1, .max_nodes = opts.max_nodes_direct});
    r.direct_seconds = seconds_since(t0);
  }

  t0 = Clock::now();
  const auto classes = classes_for(q, opts.classes, opts.long_run, opts.seed);
  bool any_feasible = false, any_open = false;
  if (classes) {
    r.classify_seconds = opts.classes ? 0.0 : seconds_since(t0);
    r.group = classes->group;
    r.total_matchings = classes->total_matchings;
    r.num_classes = classes->classes.size();
    t0 = Clock::now();
    r.classes = extend_classes(ctx, classes->classes, opts.max_nodes_per_class, opts.jobs);
    r.extend_seconds = seconds_since(t0);
  } else {
    r.note = kNoClasses;
    any_open = true;
  }

  for (const auto& c : r.classes) {
    any_feasible |= c.status == ExtensionStatus::feasible;
    any_open |= c.status == ExtensionStatus::budget_exceeded;
  }
  if (r.direct) {
    if (r.direct->status == SolveStatus::budget_exceeded) {
      any_open = true;
    } else {
      const bool direct_found = r.direct->status == SolveStatus::solution_found;
      if (direct_found && !any_feasible && !any_open)
        throw InternalError("the unforced search found an ovoid that no class extends to");
      if (!direct_found && any_feasible) throw InternalError("a class extends although the unforced search found nothing");
      any_feasible |= direct_found;
    }
  }
  r.verdict = any_feasible ? Verdict::refuted : any_open ? Verdict::inconclusive : Verdict::established;
  return r;
}

// ------------------------------------------------------------------ bounds

CountingIngredients counting_ingredients(int q) {
  if (q < 2) throw DomainError("q must be at least 2");
  const auto u = static_cast<std::uint64_t>(q);
  CountingIngredients c;
  c.subhexagons = expected_subhexagon_count(q);
  c.subhexagons_per_point = expected_subhexagons_per_point(q);
  c.max_per_subhexagon = u * u + u;
  c.bound = (u * u - u + 1) * (u * u + u);
  if (c.subhexagons * c.max_per_subhexagon != c.bound * c.subhexagons_per_point)
    throw InternalError("double count does not reproduce the counting bound");
  return c;
}

std::uint64_t counting_bound(int q) { return counting_ingredients(q).bound; }

nlohmann::json to_json(const PartialBoundReport& r) {
  const auto outcome_json = [](const PackingOutcome& o) {
    return nlohmann::json{{"status", to_string(o.status)}, {"best", o.best}, {"best_size", o.best.size()},
                          {"nodes_expanded", o.nodes_expanded}};
  };
  auto classes = nlohmann::json::array();
  for (const auto& c : r.classes) {
    auto e = outcome_json(c.outcome);
    e["representative"] = c.representative;
    e["seconds"] = c.seconds;
    classes.push_back(std::move(e));
  }
  nlohmann::json j{{"tool_version", kToolVersion},
                   {"q", r.q},
                   {"claim", "every partial distance-2 ovoid of H(q)^D has at most b points"},
                   {"b", r.b},
                   {"counting_bound", r.counting_bound},
                   {"verdict", to_string(r.verdict)},
                   {"budgets", {{"max_nodes_per_class", optional_json(r.max_nodes_per_class)}}},
                   {"wall_seconds", r.seconds},
                   {"classes", classes}};
  if (r.unrestricted) j["unrestricted"] = outcome_json(*r.unrestricted);
  if (r.note) j["note"] = *r.note;
  return j;
}

PartialBoundReport partial_bound(int q, std::uint64_t b, const PartialBoundOptions& opts) {
  check_q(q);
  const auto t0 = Clock::now();
  PartialBoundReport r;
  r.q = q;
  r.b = b;
  r.counting_bound = counting_bound(q);
  r.max_nodes_per_class = opts.max_nodes_per_class;
  if (b < r.counting_bound)
    throw ConfigError("b = " + std::to_string(b) + " is below the counting bound " + std::to_string(r.counting_bound));

  const auto ctx = prepare_extension(q);
  const auto classes = classes_for(q, opts.classes, opts.long_run, opts.seed);
  const std::vector<OvoidClass> none;
  const auto& list = classes ? classes->classes : none;
  if (!classes) r.note = kNoClasses;
  r.classes.resize(list.size());
  parallel_for(list.size(), opts.jobs, [&](std::size_t i) {
    const auto t = Clock::now();
    const auto& rep = list[i].representative;
    r.classes[i].representative = rep;
    r.classes[i].outcome =
        max_packing(ctx.instance, ctx.embedding.map_points(rep), static_cast<std::size_t>(b), opts.max_nodes_per_class);
    r.classes[i].seconds = seconds_since(t);
  });

  bool refuted = false, open = !classes;
  for (const auto& c : r.classes) {
    if (!ctx.instance.is_packing(c.outcome.best)) throw InternalError("max_packing returned a non-packing");
    refuted |= c.outcome.status == PackingStatus::bound_refuted;
    open |= c.outcome.status == PackingStatus::budget_exceeded;
  }
  if (opts.unrestricted) {
    r.unrestricted = max_packing(ctx.instance, {}, std::nullopt, opts.max_nodes_unrestricted);
    if (!ctx.instance.is_packing(r.unrestricted->best)) throw InternalError("max_packing returned a non-packing");
    if (r.unrestricted->best.size() > b) refuted = true;
  }
  r.verdict = refuted ? Verdict::refuted : open ? Verdict::inconclusive : Verdict::established;
  r.seconds = seconds_since(t0);
  return r;
}

// ------------------------------------------------------------------- table

std::vector<TableRow> class_table(const std::vector<OvoidClass>& classes) {
  std::map<std::tuple<std::uint64_t, OrbitLengths, OrbitLengths>, std::uint64_t> groups;
  for (const auto& c : classes) ++groups[{c.stabilizer_order, c.point_orbit_lengths, c.line_orbit_lengths}];
  std::vector<TableRow> rows;
  for (const auto& [key, count] : groups)
    rows.push_back({std::get<0>(key), count, std::get<1>(key), std::get<2>(key)});
  std::stable_sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
    if (a.stabilizer_order != b.stabilizer_order) return a.stabilizer_order > b.stabilizer_order;
    return a.point_orbit_lengths > b.point_orbit_lengths;
  });
  return rows;
}

nlohmann::json to_json(const TableRow& r) {
  return {{"stabilizer_order", r.stabilizer_order},
          {"count", r.count},
          {"point_orbit_lengths", lengths_json(r.point_orbit_lengths)},
          {"line_orbit_lengths", lengths_json(r.line_orbit_lengths)}};
}

}  // namespace ovoid
