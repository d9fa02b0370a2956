#include "ovoid/perm_group.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <numeric>
#include <random>
#include <unordered_map>

#include "ovoid/constructions.hpp"
#include "ovoid/errors.hpp"

namespace ovoid {

// ---------------------------------------------------------------- Perm

Perm::Perm(std::vector<std::uint32_t> images) : images_(std::move(images)) {
  std::vector<char> hit(images_.size(), 0);
  for (auto v : images_) {
    if (v >= images_.size() || hit[v]) throw DomainError("not a permutation");
    hit[v] = 1;
  }
}

Perm Perm::identity(std::size_t n) {
  std::vector<std::uint32_t> id(n);
  std::iota(id.begin(), id.end(), 0u);
  return Perm(std::move(id), Unchecked{});
}

bool Perm::is_identity() const {
  for (std::uint32_t i = 0; i < images_.size(); ++i)
    if (images_[i] != i) return false;
  return true;
}

Perm Perm::inverse() const {
  std::vector<std::uint32_t> inv(images_.size());
  for (std::uint32_t i = 0; i < images_.size(); ++i) inv[images_[i]] = i;
  return Perm(std::move(inv), Unchecked{});
}

PointSet Perm::apply(std::span<const std::uint32_t> set) const {
  PointSet out;
  out.reserve(set.size());
  for (auto x : set) out.push_back(images_[x]);
  std::sort(out.begin(), out.end());
  return out;
}

Perm operator*(const Perm& a, const Perm& b) {
  if (a.degree() != b.degree()) throw DomainError("degree mismatch in composition");
  std::vector<std::uint32_t> c(a.degree());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.images_[b.images_[i]];
  return Perm(std::move(c), Perm::Unchecked{});
}

// ------------------------------------------------------ Schreier-Sims

namespace {

std::optional<std::uint32_t> first_moved(const Perm& g) {
  for (std::uint32_t i = 0; i < g.degree(); ++i)
    if (g(i) != i) return i;
  return std::nullopt;
}

ChainLevel build_level(std::size_t degree, std::uint32_t base, const std::vector<Perm>& gens,
                       const std::vector<std::uint32_t>& gen_level) {
  ChainLevel lv;
  lv.base_point = base;
  lv.orbit_slot.assign(degree, -1);
  lv.orbit.push_back(base);
  lv.orbit_slot[base] = 0;
  lv.transversal.push_back(Perm::identity(degree));
  for (std::size_t k = 0; k < lv.orbit.size(); ++k) {
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
      if (gen_level[gi] < base) continue;
      const auto img = gens[gi](lv.orbit[k]);
      if (lv.orbit_slot[img] >= 0) continue;
      lv.orbit_slot[img] = static_cast<std::int32_t>(lv.orbit.size());
      lv.orbit.push_back(img);
      lv.transversal.push_back(gens[gi] * lv.transversal[k]);
    }
  }
  for (const auto& u : lv.transversal) lv.inverse_transversal.push_back(u.inverse());
  return lv;
}

// Sifts h through the levels; returns the residue (identity iff member).
Perm sift(const std::map<std::uint32_t, ChainLevel>& levels, Perm h) {
  while (auto p = first_moved(h)) {
    auto it = levels.find(*p);
    if (it == levels.end()) return h;
    const auto slot = it->second.orbit_slot[h(*p)];
    if (slot < 0) return h;
    h = it->second.inverse_transversal[slot] * h;
  }
  return h;
}

struct ChainBuilder {
  std::size_t degree;
  std::vector<Perm> gens;
  std::vector<std::uint32_t> gen_level;
  std::map<std::uint32_t, ChainLevel> levels;

  void add_generator(Perm g) {
    const auto lvl = first_moved(g);
    if (!lvl) return;
    gens.push_back(std::move(g));
    gen_level.push_back(*lvl);
    levels[*lvl];  // make sure the level exists; contents rebuilt on demand
  }

  void rebuild(std::uint32_t base) { levels[base] = build_level(degree, base, gens, gen_level); }

  void rebuild_all() {
    for (auto& [b, lv] : levels) lv = build_level(degree, b, gens, gen_level);
  }

  void complete() {
    if (levels.empty()) return;
    rebuild_all();
    std::uint32_t cur = levels.rbegin()->first;
    while (true) {
      rebuild(cur);
      std::optional<std::uint32_t> jump;
      const ChainLevel lv = levels.at(cur);
      for (std::size_t k = 0; k < lv.orbit.size() && !jump; ++k) {
        for (std::size_t gi = 0; gi < gens.size() && !jump; ++gi) {
          if (gen_level[gi] < cur) continue;
          const auto img = gens[gi](lv.orbit[k]);
          Perm h = lv.inverse_transversal[lv.orbit_slot[img]] * gens[gi] * lv.transversal[k];
          Perm residue = sift(levels, std::move(h));
          if (auto p = first_moved(residue)) {
            add_generator(std::move(residue));
            jump = *p;
          }
        }
      }
      if (jump) {
        cur = *jump;
        continue;
      }
      auto it = levels.find(cur);
      if (it == levels.begin()) break;
      cur = std::prev(it)->first;
    }
  }
};

}  // namespace

std::uint64_t StabilizerChain::order() const {
  unsigned __int128 o = 1;
  for (const auto& lv : levels) {
    o *= lv.orbit.size();
    if (o > std::numeric_limits<std::uint64_t>::max()) throw ResourceError("group order exceeds 2^64");
  }
  return static_cast<std::uint64_t>(o);
}

bool StabilizerChain::contains(const Perm& g) const {
  if (g.degree() != degree) return false;
  Perm h = g;
  for (const auto& lv : levels) {
    for (std::uint32_t i = 0; i < lv.base_point; ++i)
      if (h(i) != i) return false;
    const auto slot = lv.orbit_slot[h(lv.base_point)];
    if (slot < 0) return false;
    h = lv.inverse_transversal[slot] * h;
  }
  return h.is_identity();
}

StabilizerChain schreier_sims(std::size_t degree, const std::vector<Perm>& generators,
                              std::optional<std::uint64_t> random_seed) {
  ChainBuilder b{degree, {}, {}, {}};
  for (const auto& g : generators) {
    if (g.degree() != degree) throw DomainError("generator degree differs from group degree");
    b.add_generator(g);
  }
  if (random_seed && !b.gens.empty()) {
    std::mt19937_64 rng(*random_seed);
    b.rebuild_all();
    Perm x = Perm::identity(degree);
    int quiet = 0;
    while (quiet < 32) {
      x = x * generators[rng() % generators.size()];
      Perm residue = sift(b.levels, x);
      if (residue.is_identity()) {
        ++quiet;
        continue;
      }
      quiet = 0;
      b.add_generator(std::move(residue));
      b.rebuild_all();
    }
  }
  b.complete();

  StabilizerChain c;
  c.degree = degree;
  c.strong_generators = b.gens;
  for (auto& [base, lv] : b.levels)
    if (lv.orbit.size() > 1) c.levels.push_back(std::move(lv));
  return c;
}

// ----------------------------------------------------------- PermGroup

// Small groups keep every element as a row of images. Canonical images are
// then found with a base that follows the set: each step fixes the least
// point any candidate can still reach, and the pointwise stabilizer of the
// points fixed so far is a cached node.
struct ElementTable {
  struct Node {
    std::vector<std::uint32_t> elems;
    std::vector<std::uint32_t> omin;  // point -> least point of its orbit
    std::vector<std::uint32_t> rep;   // point -> element taking it to omin
    std::vector<std::uint16_t> rep_images;  // images of rep[x], row x
    std::map<std::uint32_t, std::unique_ptr<Node>> children;
  };

  std::size_t degree = 0;
  std::vector<std::uint16_t> images;  // element e, point x -> images[e * degree + x]
  Node root;
  std::shared_mutex mutex;

  std::uint32_t image(std::uint32_t e, std::uint32_t x) const { return images[e * degree + x]; }

  void finish(Node& n) const {
    n.omin.resize(degree);
    n.rep.assign(degree, n.elems.front());
    std::iota(n.omin.begin(), n.omin.end(), 0U);
    for (auto e : n.elems)
      for (std::uint32_t x = 0; x < degree; ++x) {
        const auto y = image(e, x);
        if (y < n.omin[x]) {
          n.omin[x] = y;
          n.rep[x] = e;
        }
      }
    n.rep_images.resize(degree * degree);
    for (std::size_t x = 0; x < degree; ++x)
      std::copy_n(images.begin() + static_cast<std::ptrdiff_t>(n.rep[x] * degree), degree,
                  n.rep_images.begin() + static_cast<std::ptrdiff_t>(x * degree));
  }

  const Node& child(const Node& n, std::uint32_t m) {
    {
      std::shared_lock lock(mutex);
      if (auto it = n.children.find(m); it != n.children.end()) return *it->second;
    }
    std::unique_lock lock(mutex);
    auto& slot = const_cast<Node&>(n).children[m];
    if (!slot) {
      auto c = std::make_unique<Node>();
      for (auto e : n.elems)
        if (image(e, m) == m) c->elems.push_back(e);
      finish(*c);
      slot = std::move(c);
    }
    return *slot;
  }
};

constexpr std::uint64_t kTableMaxOrder = std::uint64_t{1} << 22;
constexpr std::uint64_t kTableMaxEntries = std::uint64_t{1} << 25;

std::unique_ptr<ElementTable> build_element_table(const StabilizerChain& c) {
  const std::uint64_t order = c.order();
  if (c.degree > 65535 || order > kTableMaxOrder || order * c.degree > kTableMaxEntries) return nullptr;
  auto t = std::make_unique<ElementTable>();
  t->degree = c.degree;
  t->images.reserve(order * c.degree);
  std::vector<std::uint32_t> cur(c.degree);
  std::iota(cur.begin(), cur.end(), 0U);
  // Every element is t_0 * t_1 * ... with one transversal element per level.
  const auto rec = [&](auto&& self, std::size_t li, const std::vector<std::uint32_t>& g) -> void {
    if (li == c.levels.size()) {
      t->images.insert(t->images.end(), g.begin(), g.end());
      return;
    }
    std::vector<std::uint32_t> h(c.degree);
    for (const auto& u : c.levels[li].transversal) {
      for (std::size_t x = 0; x < c.degree; ++x) h[x] = g[u(static_cast<std::uint32_t>(x))];
      self(self, li + 1, h);
    }
  };
  rec(rec, 0, cur);
  t->root.elems.resize(order);
  std::iota(t->root.elems.begin(), t->root.elems.end(), 0U);
  t->finish(t->root);
  return t;
}

struct PermGroup::Lazy {
  std::once_flag once;
  StabilizerChain chain;
  std::once_flag table_once;
  std::unique_ptr<ElementTable> table;
};

PermGroup::PermGroup(std::size_t degree, std::vector<Perm> generators, std::optional<std::uint64_t> chain_seed)
    : degree_(degree), generators_(std::move(generators)), chain_seed_(chain_seed), lazy_(std::make_shared<Lazy>()) {
  for (const auto& g : generators_)
    if (g.degree() != degree_) throw DomainError("generator degree differs from group degree");
}

const StabilizerChain& PermGroup::chain() const {
  std::call_once(lazy_->once, [&] { lazy_->chain = schreier_sims(degree_, generators_, chain_seed_); });
  return lazy_->chain;
}

ElementTable* PermGroup::element_table() const {
  const auto& c = chain();
  std::call_once(lazy_->table_once, [&] { lazy_->table = build_element_table(c); });
  return lazy_->table.get();
}

nlohmann::json PermGroup::to_json() const {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : generators_) gens.push_back(std::vector<std::uint32_t>(g.images().begin(), g.images().end()));
  return {{"degree", degree_}, {"generators", gens}};
}

PermGroup PermGroup::from_json(const nlohmann::json& j) {
  const auto degree = j.at("degree").get<std::size_t>();
  std::vector<Perm> gens;
  for (const auto& g : j.at("generators")) {
    auto images = g.get<std::vector<std::uint32_t>>();
    if (images.size() != degree) throw ParseError("generator length differs from degree");
    gens.emplace_back(std::move(images));
  }
  return PermGroup(degree, std::move(gens));
}

std::vector<PointSet> orbits(std::size_t degree, const std::vector<Perm>& generators) {
  std::vector<char> seen(degree, 0);
  std::vector<PointSet> out;
  for (std::uint32_t x = 0; x < degree; ++x) {
    if (seen[x]) continue;
    PointSet orb{x};
    seen[x] = 1;
    for (std::size_t k = 0; k < orb.size(); ++k)
      for (const auto& g : generators) {
        const auto y = g(orb[k]);
        if (!seen[y]) {
          seen[y] = 1;
          orb.push_back(y);
        }
      }
    std::sort(orb.begin(), orb.end());
    out.push_back(std::move(orb));
  }
  return out;
}

PointSet orbit(const PermGroup& g, std::uint32_t x) {
  if (x >= g.degree()) throw DomainError("point outside the group's domain");
  PointSet orb{x};
  std::vector<char> seen(g.degree(), 0);
  seen[x] = 1;
  for (std::size_t k = 0; k < orb.size(); ++k)
    for (const auto& s : g.generators()) {
      const auto y = s(orb[k]);
      if (!seen[y]) {
        seen[y] = 1;
        orb.push_back(y);
      }
    }
  std::sort(orb.begin(), orb.end());
  return orb;
}

namespace {

struct SetHash {
  std::size_t operator()(const PointSet& s) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : s) h = (h ^ x) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

SetOrbitResult set_orbit_with_stabilizer(const PermGroup& g, const PointSet& s, std::size_t max_orbit) {
  for (auto x : s)
    if (x >= g.degree()) throw DomainError("set contains a point outside the group's domain");
  PointSet start = s;
  std::sort(start.begin(), start.end());
  const auto& gens = g.generators();

  std::vector<PointSet> sets{start};
  std::vector<std::pair<std::int32_t, std::int32_t>> parent{{-1, -1}};
  std::unordered_map<PointSet, std::uint32_t, SetHash> index{{start, 0}};
  for (std::size_t k = 0; k < sets.size(); ++k)
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
      PointSet img = gens[gi].apply(sets[k]);
      if (index.contains(img)) continue;
      if (sets.size() >= max_orbit)
        throw ResourceError("set orbit exceeds the budget of " + std::to_string(max_orbit) + " images");
      index.emplace(img, static_cast<std::uint32_t>(sets.size()));
      sets.push_back(std::move(img));
      parent.emplace_back(static_cast<std::int32_t>(k), static_cast<std::int32_t>(gi));
    }

  SetOrbitResult r;
  r.orbit_size = sets.size();
  const std::uint64_t order = g.order();
  if (order % r.orbit_size != 0) throw InternalError("set orbit length does not divide the group order");
  r.stabilizer_order = order / r.orbit_size;

  // path(k) maps the start set onto sets[k].
  auto path = [&](std::size_t k) {
    std::vector<std::int32_t> steps;
    for (auto cur = static_cast<std::int32_t>(k); parent[cur].first >= 0; cur = parent[cur].first)
      steps.push_back(parent[cur].second);
    Perm w = Perm::identity(g.degree());
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) w = gens[*it] * w;
    return w;
  };

  StabilizerChain stab = schreier_sims(g.degree(), {});
  for (std::size_t k = 0; k < sets.size() && stab.order() < r.stabilizer_order; ++k) {
    const Perm wk = path(k);
    for (std::size_t gi = 0; gi < gens.size() && stab.order() < r.stabilizer_order; ++gi) {
      const auto m = index.at(gens[gi].apply(sets[k]));
      if (parent[m] == std::make_pair(static_cast<std::int32_t>(k), static_cast<std::int32_t>(gi))) continue;
      Perm h = path(m).inverse() * gens[gi] * wk;
      if (h.is_identity() || stab.contains(h)) continue;
      r.stabilizer_generators.push_back(std::move(h));
      stab = schreier_sims(g.degree(), r.stabilizer_generators);
    }
  }
  if (stab.order() != r.stabilizer_order)
    throw InternalError("Schreier generators do not reach the stabilizer order");
  return r;
}

namespace {

// <0 if a is the better (smaller) image on [0, bound), >0 if b is, 0 if equal.
int compare_prefix(const PointSet& a, const PointSet& b, std::uint32_t bound) {
  constexpr std::uint32_t kEnd = std::numeric_limits<std::uint32_t>::max();
  for (std::size_t i = 0;; ++i) {
    const std::uint32_t x = i < a.size() && a[i] < bound ? a[i] : kEnd;
    const std::uint32_t y = i < b.size() && b[i] < bound ? b[i] : kEnd;
    if (x == kEnd && y == kEnd) return 0;
    if (x != y) return x < y ? -1 : 1;
  }
}

PointSet smallest_image_generic(const PermGroup& g, const PointSet& s);

// Fixed-width bitset variant of the search below. For sets A, B the sorted
// sequence of A is lexicographically smaller iff min(A xor B) lies in A.
template <std::size_t W>
struct Bits {
  std::array<std::uint64_t, W> w{};
  bool test(std::uint32_t x) const { return (w[x >> 6] >> (x & 63)) & 1U; }
  void set(std::uint32_t x) { w[x >> 6] |= std::uint64_t{1} << (x & 63); }
  bool operator==(const Bits&) const = default;
};

template <std::size_t W>
int compare_bits(const Bits<W>& a, const Bits<W>& b, std::uint32_t bound) {
  for (std::size_t i = 0; i < W; ++i) {
    std::uint64_t d = a.w[i] ^ b.w[i];
    const std::uint32_t lo = static_cast<std::uint32_t>(i * 64);
    if (bound <= lo) return 0;
    if (bound < lo + 64) d &= (std::uint64_t{1} << (bound - lo)) - 1;
    if (d == 0) continue;
    return (a.w[i] & d & (~d + 1)) ? -1 : 1;
  }
  return 0;
}

template <std::size_t W>
PointSet smallest_image_bits(const StabilizerChain& chain, const PointSet& s) {
  using B = Bits<W>;
  const auto& levels = chain.levels;
  const auto lt = [](const B& a, const B& b) { return compare_bits(a, b, W * 64) < 0; };
  std::vector<B> cands(1), next;
  for (auto x : s) cands[0].set(x);
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const auto& lv = levels[li];
    const std::uint32_t bound = li + 1 < levels.size() ? levels[li + 1].base_point : W * 64;
    bool hit = false;
    for (const auto& t : cands)
      for (auto o : lv.orbit)
        if (t.test(o)) {
          hit = true;
          break;
        }
    next.clear();
    for (const auto& t : cands)
      for (std::size_t k = 0; k < lv.orbit.size(); ++k) {
        if (hit && !t.test(lv.orbit[k])) continue;
        const auto img = lv.inverse_transversal[k].images();
        B u;
        for (std::size_t i = 0; i < W; ++i)
          for (std::uint64_t m = t.w[i]; m; m &= m - 1)
            u.set(img[i * 64 + static_cast<std::size_t>(std::countr_zero(m))]);
        next.push_back(u);
      }
    std::size_t best = 0;
    for (std::size_t i = 1; i < next.size(); ++i)
      if (compare_bits(next[i], next[best], bound) < 0) best = i;
    const B best_copy = next[best];
    cands.clear();
    for (const auto& t : next)
      if (compare_bits(t, best_copy, bound) == 0) cands.push_back(t);
    std::sort(cands.begin(), cands.end(), lt);
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  }
  const B& m = *std::min_element(cands.begin(), cands.end(), lt);
  PointSet out;
  for (std::uint32_t x = 0; x < W * 64; ++x)
    if (m.test(x)) out.push_back(x);
  return out;
}

template <std::size_t W>
PointSet smallest_image_table_bits(ElementTable& t, const PointSet& s) {
  using B = Bits<W>;
  const auto lt = [](const B& a, const B& b) { return compare_bits(a, b, W * 64) < 0; };
  std::vector<B> cands(1), next;
  for (auto x : s) cands[0].set(x);
  B fixed;  // points already settled, common to every candidate
  const ElementTable::Node* node = &t.root;
  for (std::size_t k = 0; k < s.size() && node->elems.size() > 1; ++k) {
    std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
    for (const auto& c : cands)
      for (std::size_t i = 0; i < W; ++i)
        for (std::uint64_t b = c.w[i] & ~fixed.w[i]; b; b &= b - 1)
          m = std::min(m, node->omin[i * 64 + static_cast<std::size_t>(std::countr_zero(b))]);
    next.clear();
    for (const auto& c : cands)
      for (std::size_t i = 0; i < W; ++i)
        for (std::uint64_t b = c.w[i] & ~fixed.w[i]; b; b &= b - 1) {
          const auto x = static_cast<std::uint32_t>(i * 64 + static_cast<std::size_t>(std::countr_zero(b)));
          if (node->omin[x] != m) continue;
          const std::uint16_t* img = node->rep_images.data() + x * t.degree;
          B u;
          for (std::size_t j = 0; j < W; ++j)
            for (std::uint64_t d = c.w[j]; d; d &= d - 1) u.set(img[j * 64 + static_cast<std::size_t>(std::countr_zero(d))]);
          next.push_back(u);
        }
    std::sort(next.begin(), next.end(), lt);
    next.erase(std::unique(next.begin(), next.end()), next.end());
    std::swap(cands, next);
    fixed.set(m);
    node = &t.child(*node, m);
  }
  const B& best = *std::min_element(cands.begin(), cands.end(), lt);
  PointSet out;
  for (std::size_t i = 0; i < W; ++i)
    for (std::uint64_t b = best.w[i]; b; b &= b - 1)
      out.push_back(static_cast<std::uint32_t>(i * 64 + static_cast<std::size_t>(std::countr_zero(b))));
  return out;
}

// Candidates are rows of a flat buffer, each row a sorted image of s.
PointSet smallest_image_table(ElementTable& t, const PointSet& s) {
  const std::size_t w = s.size();
  std::vector<std::uint32_t> cands(s.begin(), s.end()), next, order;
  std::sort(cands.begin(), cands.end());
  const auto row = [&](const std::vector<std::uint32_t>& buf, std::size_t r) { return buf.begin() + static_cast<std::ptrdiff_t>(r * w); };
  const ElementTable::Node* node = &t.root;
  for (std::size_t k = 0; k < w && node->elems.size() > 1; ++k) {
    const std::size_t rows = cands.size() / w;
    std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t i = k; i < w; ++i) m = std::min(m, node->omin[cands[r * w + i]]);
    next.clear();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t i = k; i < w; ++i) {
        if (node->omin[cands[r * w + i]] != m) continue;
        const std::uint16_t* img = node->rep_images.data() + cands[r * w + i] * t.degree;
        const std::size_t at = next.size();
        for (std::size_t j = 0; j < w; ++j) next.push_back(img[cands[r * w + j]]);
        std::sort(next.begin() + static_cast<std::ptrdiff_t>(at), next.end());
      }
    const std::size_t nrows = next.size() / w;
    order.resize(nrows);
    std::iota(order.begin(), order.end(), 0U);
    const auto less = [&](std::uint32_t a, std::uint32_t b) {
      return std::lexicographical_compare(row(next, a), row(next, a) + static_cast<std::ptrdiff_t>(w), row(next, b),
                                          row(next, b) + static_cast<std::ptrdiff_t>(w));
    };
    std::sort(order.begin(), order.end(), less);
    cands.clear();
    for (std::size_t i = 0; i < nrows; ++i) {
      if (i > 0 && !less(order[i - 1], order[i])) continue;
      cands.insert(cands.end(), row(next, order[i]), row(next, order[i]) + static_cast<std::ptrdiff_t>(w));
    }
    node = &t.child(*node, m);
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < cands.size() / w; ++r)
    if (std::lexicographical_compare(row(cands, r), row(cands, r) + static_cast<std::ptrdiff_t>(w), row(cands, best),
                                     row(cands, best) + static_cast<std::ptrdiff_t>(w)))
      best = r;
  return PointSet(row(cands, best), row(cands, best) + static_cast<std::ptrdiff_t>(w));
}

}  // namespace

PointSet smallest_image_set(const PermGroup& g, const PointSet& s) {
  for (auto x : s)
    if (x >= g.degree()) throw DomainError("set contains a point outside the group's domain");
  if (s.empty()) return {};
  if (auto* t = g.element_table()) {
    if (g.degree() <= 64) return smallest_image_table_bits<1>(*t, s);
    if (g.degree() <= 128) return smallest_image_table_bits<2>(*t, s);
    if (g.degree() <= 256) return smallest_image_table_bits<4>(*t, s);
    return smallest_image_table(*t, s);
  }
  return smallest_image_chain(g, s);
}

PointSet smallest_image_chain(const PermGroup& g, const PointSet& s) {
  for (auto x : s)
    if (x >= g.degree()) throw DomainError("set contains a point outside the group's domain");
  const std::size_t n = g.degree();
  if (n <= 64) return smallest_image_bits<1>(g.chain(), s);
  if (n <= 128) return smallest_image_bits<2>(g.chain(), s);
  if (n <= 256) return smallest_image_bits<4>(g.chain(), s);
  return smallest_image_generic(g, s);
}

namespace {

PointSet smallest_image_generic(const PermGroup& g, const PointSet& s) {
  PointSet start = s;
  std::sort(start.begin(), start.end());
  const auto& levels = g.chain().levels;

  std::vector<PointSet> cands{start};
  PointSet img;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const auto& lv = levels[li];
    const std::uint32_t bound =
        li + 1 < levels.size() ? levels[li + 1].base_point : static_cast<std::uint32_t>(g.degree());
    bool hit = false;
    for (const auto& t : cands)
      for (auto x : t)
        if (lv.orbit_slot[x] >= 0) {
          hit = true;
          break;
        }
    std::vector<PointSet> next;
    for (const auto& t : cands)
      for (std::size_t k = 0; k < lv.orbit.size(); ++k) {
        if (hit && !std::binary_search(t.begin(), t.end(), lv.orbit[k])) continue;
        next.push_back(lv.inverse_transversal[k].apply(t));
      }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    // Points below `bound` are fixed by the rest of the chain: keep the best.
    const PointSet* best = &next.front();
    for (const auto& t : next)
      if (compare_prefix(t, *best, bound) < 0) best = &t;
    const PointSet best_copy = *best;
    cands.clear();
    for (auto& t : next)
      if (compare_prefix(t, best_copy, bound) == 0) cands.push_back(std::move(t));
  }
  return *std::min_element(cands.begin(), cands.end());
}

}  // namespace

// ------------------------------------------------- flag hexagon groups

namespace {

using Mat3 = std::array<std::array<Elem, 3>, 3>;

Vec3 mat_vec(const FiniteField& f, const Mat3& m, const Vec3& v) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i] = f.add(out[i], f.mul(m[i][j], v[j]));
  return out;
}

Mat3 inverse_transpose(const FiniteField& f, const Mat3& m) {
  // Gauss-Jordan on [m | I], then transpose.
  Mat3 a = m, inv{};
  for (int i = 0; i < 3; ++i) inv[i][i] = 1;
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    while (piv < 3 && a[piv][c] == 0) ++piv;
    if (piv == 3) throw DomainError("singular matrix");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    const Elem s = f.inv(a[c][c]);
    for (int j = 0; j < 3; ++j) {
      a[c][j] = f.mul(a[c][j], s);
      inv[c][j] = f.mul(inv[c][j], s);
    }
    for (int r = 0; r < 3; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Elem k = a[r][c];
      for (int j = 0; j < 3; ++j) {
        a[r][j] = f.sub(a[r][j], f.mul(k, a[c][j]));
        inv[r][j] = f.sub(inv[r][j], f.mul(k, inv[c][j]));
      }
    }
  }
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = inv[j][i];
  return t;
}

struct FlagHexagonFrame {
  explicit FlagHexagonFrame(const FiniteField& field)
      : f(field), coords(pg2_coordinates(field)), flags(pg2_flags(field)), geometry(build_flag_hexagon(field)) {
    const int q = f.q();
    index_of.assign(static_cast<std::size_t>(q * q * q), 0);
    for (std::uint32_t k = 0; k < coords.size(); ++k) index_of[key(coords[k])] = k;
    flag_index.assign(coords.size() * coords.size(), 0);
    for (std::uint32_t k = 0; k < flags.size(); ++k)
      flag_index[flags[k].first * coords.size() + flags[k].second] = k;
  }

  std::size_t key(const Vec3& v) const { return (static_cast<std::size_t>(v[0]) * f.q() + v[1]) * f.q() + v[2]; }

  std::uint32_t index(Vec3 v) const {
    auto lead = std::find_if(v.begin(), v.end(), [](Elem e) { return e != 0; });
    const Elem s = f.inv(*lead);
    for (auto& e : v) e = f.mul(e, s);
    return index_of[key(v)];
  }

  // Vertex permutation from maps on PG(2,q) points and lines (by index).
  Perm induced(const std::vector<std::uint32_t>& on_points, const std::vector<std::uint32_t>& on_lines,
               bool swap_types) const {
    const std::size_t n = coords.size();
    std::vector<std::uint32_t> img(flags.size() + 2 * n);
    for (std::uint32_t k = 0; k < flags.size(); ++k) {
      auto x = on_points[flags[k].first], l = on_lines[flags[k].second];
      if (swap_types) std::swap(x, l);
      img[k] = flag_index[x * n + l];
    }
    const auto base = static_cast<std::uint32_t>(flags.size());
    for (std::uint32_t x = 0; x < n; ++x) {
      img[base + x] = base + on_points[x] + (swap_types ? static_cast<std::uint32_t>(n) : 0);
      img[base + n + x] = base + on_lines[x] + (swap_types ? 0 : static_cast<std::uint32_t>(n));
    }
    return Perm(std::move(img));
  }

  Perm from_matrix(const Mat3& m) const {
    const Mat3 mt = inverse_transpose(f, m);
    std::vector<std::uint32_t> on_points, on_lines;
    for (const auto& c : coords) {
      on_points.push_back(index(mat_vec(f, m, c)));
      on_lines.push_back(index(mat_vec(f, mt, c)));
    }
    return induced(on_points, on_lines, false);
  }

  Perm frobenius() const {
    std::vector<std::uint32_t> on;
    for (const auto& c : coords) on.push_back(index({f.frobenius(c[0]), f.frobenius(c[1]), f.frobenius(c[2])}));
    return induced(on, on, false);
  }

  Perm duality() const {
    std::vector<std::uint32_t> id(coords.size());
    std::iota(id.begin(), id.end(), 0u);
    return induced(id, id, true);
  }

  const FiniteField& f;
  std::vector<Vec3> coords;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> flags;
  Geometry geometry;
  std::vector<std::uint32_t> index_of;
  std::vector<std::uint32_t> flag_index;
};

PermGroup flag_hexagon_group(const FiniteField& f, bool with_diagonal) {
  const FlagHexagonFrame frame(f);
  std::vector<Perm> gens;
  // Transvections I + c e_ij with c running over the additive basis 1, w, ..., w^(r-1).
  std::vector<Elem> basis{1};
  for (int k = 1; k < f.r(); ++k) basis.push_back(f.mul(basis.back(), f.primitive()));
  for (Elem c : basis)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        Mat3 m{};
        for (int k = 0; k < 3; ++k) m[k][k] = 1;
        m[i][j] = c;
        gens.push_back(frame.from_matrix(m));
      }
  if (with_diagonal && f.q() > 2) {
    Mat3 d{};
    d[0][0] = f.primitive();
    d[1][1] = d[2][2] = 1;
    gens.push_back(frame.from_matrix(d));
  }
  if (f.r() > 1) gens.push_back(frame.frobenius());
  gens.push_back(frame.duality());
  for (const auto& g : gens)
    if (!is_automorphism(frame.geometry, g))
      throw InternalError("flag hexagon generator is not an automorphism");
  return PermGroup(frame.geometry.num_vertices(), std::move(gens));
}

}  // namespace

bool is_automorphism(const Geometry& geo, const Perm& g) {
  if (g.degree() != geo.num_vertices()) return false;
  for (Vertex v = 0; v < geo.num_vertices(); ++v)
    if (geo.is_point(v) != geo.is_point(g(v))) return false;
  for (std::uint32_t l = 0; l < geo.num_lines(); ++l) {
    const LineId image = geo.as_line(g(geo.vertex(LineId{l})));
    if (g.apply(geo.points_on({l})) != geo.points_on(image)) return false;
  }
  return true;
}

PermGroup build_aut_flag_hexagon(const FiniteField& f) { return flag_hexagon_group(f, true); }

PermGroup build_subhexagon_stabilizer_action(const FiniteField& f) { return flag_hexagon_group(f, false); }

int subhexagon_stabilizer_kernel(int q) { return std::gcd(3, q - 1); }

std::uint64_t aut_flag_hexagon_order(int p, int r) {
  std::uint64_t q = 1;
  for (int i = 0; i < r; ++i) q *= static_cast<std::uint64_t>(p);
  const std::uint64_t q3 = q * q * q;
  return 2 * static_cast<std::uint64_t>(r) * (q3 - 1) * (q3 - q) * (q3 - q * q) / (q - 1);
}

}  // namespace ovoid
