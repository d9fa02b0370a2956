// Command-line front end: constructions, validation, the ovoid pipeline and
// the generic exact-hitting-set engine for user geometries.
//
// Exit status: 0 when a verdict is reached (either way), 2 when a budget ran
// out first, 1 on usage or input errors.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ovoid/constructions.hpp"
#include "ovoid/errors.hpp"
#include "ovoid/exact_cover.hpp"
#include "ovoid/geometry.hpp"
#include "ovoid/perm_group.hpp"
#include "ovoid/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ovoid;

namespace {

enum Exit { kOk = 0, kError = 1, kInconclusive = 2 };

struct Globals {
  unsigned jobs = 1;
  std::string format = "text";
  std::optional<std::uint64_t> seed;
};

int exit_for(Verdict v) { return v == Verdict::inconclusive ? kInconclusive : kOk; }

std::string set_text(const PointSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

std::optional<std::uint64_t> opt(std::uint64_t v, bool given) {
  return given ? std::optional<std::uint64_t>(v) : std::nullopt;
}

void emit(const Globals& g, const json& j, const std::string& text) {
  if (g.format == "json")
    std::cout << j.dump(2) << '\n';
  else
    std::cout << text;
}

std::optional<Classification> maybe_classes(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_classification(path);
}

Geometry build_named(int q, const std::string& which) {
  const auto f = make_field(q);
  if (which == "pg2") return build_pg2(f);
  if (which == "flaghex") return build_flag_hexagon(f);
  return build_dual_split_cayley(f);
}

std::string report_text(const ProofReport& r) {
  std::ostringstream out;
  out << "q = " << r.q << ", manifest " << r.manifest_hash << '\n';
  if (r.direct)
    out << "direct search: " << to_string(r.direct->status) << " after " << r.direct->nodes_expanded << " nodes\n";
  if (r.note) out << "note: " << *r.note << '\n';
  if (!r.classes.empty()) {
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& c : r.classes) ++counts[static_cast<int>(c.status)];
    out << r.num_classes << " classes of " << r.total_matchings << " matchings (" << to_string(r.group)
        << "): " << counts[0] << " infeasible, " << counts[1] << " feasible, " << counts[2] << " over budget\n";
    for (const auto& c : r.classes)
      if (c.status != ExtensionStatus::infeasible)
        out << "  " << set_text(c.representative) << ": " << to_string(c.status) << '\n';
  }
  out << "verdict (no distance-2 ovoid): " << to_string(r.verdict) << '\n';
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance-j ovoids of finite generalized polygons"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "seed for the randomized Schreier-Sims variant");

  int q = 2;
  const auto add_q = [&](CLI::App* c) { c->add_option("--q", q, "field order")->required(); };

  // build
  auto* build = app.add_subcommand("build", "write a geometry as JSON");
  add_q(build);
  std::string which, out_path;
  build->add_option("--which", which)->required()->check(CLI::IsMember({"pg2", "flaghex", "dualsplitcayley"}));
  build->add_option("--out", out_path)->required();

  // validate
  auto* validate = app.add_subcommand("validate", "check a geometry file is a generalized n-gon");
  std::string in_path;
  int n = 0;
  validate->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
  validate->add_option("--n", n, "claimed gonality")->required();

  // permanent
  auto* permanent = app.add_subcommand("permanent", "perfect matchings of the incidence graph of PG(2,q)");
  add_q(permanent);

  // subhex
  auto* subhex = app.add_subcommand("subhex", "subhexagons of order (q,1) of H(q)^D");
  add_q(subhex);
  bool enumerate = false;
  subhex->add_flag("--enumerate", enumerate, "enumerate all of them");

  // classify
  auto* classify = app.add_subcommand("classify", "classify distance-2 ovoids of H(q,1)");
  add_q(classify);
  bool long_run = false;
  std::string group_name = "subhex-stabilizer", checkpoint;
  classify->add_flag("--long-run", long_run, "allow the q = 4 run");
  classify->add_option("--out", out_path)->required();
  classify->add_option("--group", group_name, "classifying group")->check(CLI::IsMember({"subhex-stabilizer", "full"}));
  classify->add_option("--checkpoint", checkpoint, "append classes here as they are found; resumes from it");

  // extend / nonexistence
  std::string classes_path;
  std::uint64_t budget = 0, direct_budget = 0;
  auto* extend = app.add_subcommand("extend", "try to extend each class to a distance-2 ovoid of H(q)^D");
  add_q(extend);
  extend->add_option("--classes", classes_path)->check(CLI::ExistingFile);
  extend->add_flag("--long-run", long_run, "classify first when no classes are given");
  auto* budget_opt_e = extend->add_option("--budget-nodes", budget, "search nodes per class");

  auto* nonexist = app.add_subcommand("nonexistence", "prove H(q)^D has no distance-2 ovoid");
  add_q(nonexist);
  nonexist->add_option("--classes", classes_path)->check(CLI::ExistingFile);
  nonexist->add_flag("--long-run", long_run, "classify first when no classes are given");
  auto* budget_opt_n = nonexist->add_option("--budget-nodes", budget, "search nodes per class");
  auto* direct_opt = nonexist->add_option("--direct-budget-nodes", direct_budget, "search nodes, unforced search");

  // bound
  auto* bound = app.add_subcommand("bound", "bound the size of partial distance-2 ovoids by b");
  add_q(bound);
  std::uint64_t b = 0;
  bool witness = false;
  bound->add_option("--b", b)->required();
  bound->add_option("--classes", classes_path)->check(CLI::ExistingFile);
  bound->add_flag("--long-run", long_run, "classify first when no classes are given");
  auto* budget_opt_b = bound->add_option("--budget-nodes", budget, "search nodes per class");
  bound->add_flag("--witness", witness, "also find a largest partial ovoid (default for q = 2)");

  // table
  auto* table = app.add_subcommand("table", "class table by stabilizer order");
  add_q(table);
  table->add_option("--classes", classes_path)->required()->check(CLI::ExistingFile);

  // export-lp
  auto* export_lp_cmd = app.add_subcommand("export-lp", "write one LP model per class");
  add_q(export_lp_cmd);
  std::string mode = "exact";
  export_lp_cmd->add_option("--classes", classes_path)->required()->check(CLI::ExistingFile);
  export_lp_cmd->add_option("--mode", mode)->check(CLI::IsMember({"exact", "packing"}));
  export_lp_cmd->add_option("--out", out_path, "output directory")->required();

  // ovoid-check
  auto* check = app.add_subcommand("ovoid-check", "search a distance-j ovoid in a geometry file");
  std::string geometry_path, forced_path;
  int j = 2;
  check->add_option("--geometry", geometry_path)->required()->check(CLI::ExistingFile);
  check->add_option("--j", j)->required();
  check->add_option("--forced", forced_path, "JSON array of point indices")->check(CLI::ExistingFile);
  auto* budget_opt_c = check->add_option("--budget-nodes", budget, "search nodes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }
  if (seed_opt->count()) g.seed = seed;

  try {
    if (build->parsed()) {
      const auto geo = build_named(q, which);
      save_geometry(geo, out_path);
      json jr{{"name", geo.name()}, {"points", geo.num_points()}, {"lines", geo.num_lines()}, {"out", out_path}};
      std::string text = geo.name() + ": " + std::to_string(geo.num_points()) + " points, " +
                         std::to_string(geo.num_lines()) + " lines -> " + out_path + "\n";
      if (which == "dualsplitcayley") {
        // Coordinates and field modulus alongside the incidence file.
        const auto manifest_path = out_path + ".manifest.json";
        std::ofstream m(manifest_path);
        m << build_dual_split_cayley_model(make_field(q)).manifest().dump(1) << '\n';
        if (!m) throw ResourceError("cannot write " + manifest_path);
        jr["manifest"] = manifest_path;
        text += "manifest -> " + manifest_path + "\n";
      }
      emit(g, jr, text);
      return kOk;
    }

    if (validate->parsed()) {
      const auto geo = load_geometry(in_path);
      const auto r = validate_gp(geo, n);
      const auto opt_json = [](const auto& v) { return v ? json(*v) : json(nullptr); };
      json jr{{"name", geo.name()},
              {"is_valid", r.is_valid},
              {"n", r.n},
              {"s", r.s},
              {"t", r.t},
              {"regular", r.regular},
              {"diameter", opt_json(r.diameter)},
              {"girth", opt_json(r.girth)},
              {"axiom1_ok", opt_json(r.axiom1_ok)},
              {"axiom2_ok", opt_json(r.axiom2_ok)}};
      if (r.failure_witness) jr["failure_witness"] = {r.failure_witness->first, r.failure_witness->second};
      if (!r.failure.empty()) jr["failure"] = r.failure;
      std::string text = geo.name() + ": " + (r.is_valid ? "generalized " + std::to_string(n) + "-gon of order (" +
                                                                std::to_string(r.s) + "," + std::to_string(r.t) + ")"
                                                          : "not a generalized " + std::to_string(n) + "-gon") + "\n";
      if (!r.failure.empty()) text += "  " + r.failure + "\n";
      emit(g, jr, text);
      return r.is_valid ? kOk : kError;
    }

    if (permanent->parsed()) {
      const auto pg = build_pg2(make_field(q));
      const auto p = permanent_ryser(incidence_matrix(pg)).str();
      emit(g, {{"q", q}, {"permanent", p}}, p + "\n");
      return kOk;
    }

    if (subhex->parsed()) {
      const auto h = build_dual_split_cayley(make_field(q));
      json jr{{"q", q}};
      std::string text;
      if (enumerate) {
        const auto e = enumerate_subhexagons(h, q);
        jr["count"] = e.subhexagons.size();
        jr["expected"] = expected_subhexagon_count(q);
        jr["per_point"] = expected_subhexagons_per_point(q);
        text = std::to_string(e.subhexagons.size()) + " subhexagons (expected " +
               std::to_string(expected_subhexagon_count(q)) + "), " + std::to_string(expected_subhexagons_per_point(q)) +
               " through each point\n";
      } else {
        const auto s = first_subhexagon(h);
        jr["points"] = s.point_ids;
        jr["lines"] = s.line_ids;
        text = "subhexagon through line 0: " + std::to_string(s.point_ids.size()) + " points, " +
               std::to_string(s.line_ids.size()) + " lines\n";
      }
      emit(g, jr, text);
      return kOk;
    }

    if (classify->parsed()) {
      ClassifyOptions o;
      o.group = parse_classify_group(group_name);
      o.long_run = long_run;
      o.seed = g.seed;
      if (!checkpoint.empty()) o.checkpoint = checkpoint;
      if (g.format == "text")
        o.progress = [](const Classification& c) {
          std::cerr << "\r" << c.classes.size() << " classes after " << c.matchings_examined << " matchings"
                    << std::flush;
        };
      const auto c = classify_ovoids(q, o);
      if (o.progress) std::cerr << '\n';
      save_classification(c, out_path);
      std::uint64_t sum = 0;
      for (const auto& k : c.classes) sum += k.orbit_size;
      emit(g,
           {{"q", q},
            {"classes", c.classes.size()},
            {"orbit_sum", sum},
            {"total_matchings", c.total_matchings},
            {"matchings_examined", c.matchings_examined},
            {"seconds", c.seconds},
            {"out", out_path}},
           std::to_string(c.classes.size()) + " classes; orbit sizes sum to " + std::to_string(sum) + " of " +
               std::to_string(c.total_matchings) + " matchings (" + std::to_string(c.matchings_examined) +
               " examined) -> " + out_path + "\n");
      return kOk;
    }

    if (extend->parsed() || nonexist->parsed()) {
      ProofOptions o;
      o.classes = maybe_classes(classes_path);
      o.long_run = long_run;
      o.jobs = g.jobs;
      o.seed = g.seed;
      o.direct = nonexist->parsed();
      o.max_nodes_per_class = opt(budget, budget_opt_e->count() + budget_opt_n->count() > 0);
      o.max_nodes_direct = opt(direct_budget, direct_opt->count() > 0);
      const auto r = prove_nonexistence(q, o);
      emit(g, to_json(r), report_text(r));
      return exit_for(r.verdict);
    }

    if (bound->parsed()) {
      PartialBoundOptions o;
      o.classes = maybe_classes(classes_path);
      o.long_run = long_run;
      o.jobs = g.jobs;
      o.unrestricted = witness || q == 2;
      o.seed = g.seed;
      o.max_nodes_per_class = opt(budget, budget_opt_b->count() > 0);
      const auto r = partial_bound(q, b, o);
      std::ostringstream text;
      text << "counting bound " << r.counting_bound << "; " << r.classes.size() << " classes checked against b = " << b
           << '\n';
      if (r.note) text << "note: " << *r.note << '\n';
      for (const auto& c : r.classes)
        if (c.outcome.status != PackingStatus::bound_established)
          text << "  " << set_text(c.representative) << ": " << to_string(c.outcome.status) << '\n';
      if (r.unrestricted)
        text << "largest partial ovoid found: " << r.unrestricted->best.size() << " points ("
             << to_string(r.unrestricted->status) << ") " << set_text(r.unrestricted->best) << '\n';
      text << "verdict (|O| <= " << b << "): " << to_string(r.verdict) << '\n';
      emit(g, to_json(r), text.str());
      return exit_for(r.verdict);
    }

    if (table->parsed()) {
      const auto c = load_classification(classes_path);
      if (c.q != q) throw ConfigError("classes are for q = " + std::to_string(c.q));
      const auto rows = class_table(c.classes);
      json jr = json::array();
      std::ostringstream text;
      text << "stabilizer  count  point orbits  |  line orbits\n";
      for (const auto& r : rows) {
        jr.push_back(to_json(r));
        text << r.stabilizer_order << "  " << r.count << "  " << format_orbit_lengths(r.point_orbit_lengths) << "  |  "
             << format_orbit_lengths(r.line_orbit_lengths) << '\n';
      }
      emit(g, jr, text.str());
      return kOk;
    }

    if (export_lp_cmd->parsed()) {
      const auto c = load_classification(classes_path);
      if (c.q != q) throw ConfigError("classes are for q = " + std::to_string(c.q));
      const auto ctx = prepare_extension(q);
      fs::create_directories(out_path);
      const auto lp_mode = mode == "exact" ? LpMode::exact : LpMode::packing;
      json files = json::array();
      for (std::size_t i = 0; i < c.classes.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "class_%03zu.lp", i);
        const auto path = fs::path(out_path) / name;
        export_lp(ctx.instance, ctx.embedding.map_points(c.classes[i].representative), lp_mode, path);
        files.push_back(path.string());
      }
      emit(g, {{"mode", mode}, {"files", files}},
           std::to_string(files.size()) + " " + mode + " models -> " + out_path + "\n");
      return kOk;
    }

    if (check->parsed()) {
      const auto geo = load_geometry(geometry_path);
      const auto inst = build_hitting_instance(geo, j);
      PointSet forced;
      if (!forced_path.empty()) {
        std::ifstream in(forced_path);
        json jf;
        try {
          in >> jf;
          forced = jf.get<PointSet>();
        } catch (const json::exception& e) {
          throw ParseError(forced_path + ": " + e.what());
        }
        std::sort(forced.begin(), forced.end());
      }
      const auto r = dlx_solve(inst, forced, {.max_solutions = 1, .max_nodes = opt(budget, budget_opt_c->count() > 0)});
      json jr{{"geometry", geo.name()},
              {"j", j},
              {"blocks", inst.blocks.size()},
              {"status", to_string(r.status)},
              {"nodes_expanded", r.nodes_expanded},
              {"solutions", r.solutions}};
      std::string text = geo.name() + ", j = " + std::to_string(j) + ": " + to_string(r.status) + " after " +
                         std::to_string(r.nodes_expanded) + " nodes\n";
      if (!r.solutions.empty()) text += "  " + set_text(r.solutions.front()) + "\n";
      emit(g, jr, text);
      return r.status == SolveStatus::budget_exceeded ? kInconclusive : kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
