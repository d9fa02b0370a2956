#include "ovoid/constructions.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include "ovoid/errors.hpp"

namespace ovoid {

namespace {

template <std::size_t N>
std::vector<std::array<Elem, N>> normalized_vectors(const FiniteField& f) {
  const int q = f.q();
  std::vector<std::array<Elem, N>> out;
  std::array<Elem, N> v{};
  // Odometer with coordinate 0 most significant gives lexicographic order.
  while (true) {
    auto lead = std::find_if(v.begin(), v.end(), [](Elem e) { return e != 0; });
    if (lead != v.end() && *lead == 1) out.push_back(v);
    int k = static_cast<int>(N) - 1;
    while (k >= 0 && v[k] == q - 1) v[k--] = 0;
    if (k < 0) break;
    ++v[k];
  }
  return out;
}

template <std::size_t N>
std::array<Elem, N> normalize(const FiniteField& f, std::array<Elem, N> v) {
  auto lead = std::find_if(v.begin(), v.end(), [](Elem e) { return e != 0; });
  if (lead == v.end()) return v;
  const Elem s = f.inv(*lead);
  for (auto& e : v) e = f.mul(e, s);
  return v;
}

std::uint32_t vec_key(const Vec7& v, int q) {
  std::uint32_t k = 0;
  for (Elem e : v) k = k * static_cast<std::uint32_t>(q) + e;
  return k;
}

Vec7 axpy(const FiniteField& f, Elem a, const Vec7& x, const Vec7& y) {
  Vec7 out;
  for (int i = 0; i < 7; ++i) out[i] = f.add(f.mul(a, x[i]), y[i]);
  return out;
}

std::array<Vec7, 2> rref(const FiniteField& f, Vec7 a, Vec7 b) {
  a = normalize(f, a);
  const int p1 = static_cast<int>(std::find_if(a.begin(), a.end(), [](Elem e) { return e != 0; }) - a.begin());
  b = axpy(f, f.neg(b[p1]), a, b);
  b = normalize(f, b);
  const int p2 = static_cast<int>(std::find_if(b.begin(), b.end(), [](Elem e) { return e != 0; }) - b.begin());
  if (p2 == 7) throw DomainError("vectors are linearly dependent");
  a = axpy(f, f.neg(a[p2]), b, a);
  if (p2 < p1) std::swap(a, b);
  return {a, b};
}

// Index of p_ij (i < j) in the 21-entry layout.
int pair_index(int i, int j) { return i * 7 - i * (i + 1) / 2 + (j - i - 1); }

}  // namespace

std::vector<Vec3> pg2_coordinates(const FiniteField& f) { return normalized_vectors<3>(f); }

Elem dot(const FiniteField& f, const Vec3& a, const Vec3& b) {
  Elem s = 0;
  for (int i = 0; i < 3; ++i) s = f.add(s, f.mul(a[i], b[i]));
  return s;
}

Geometry build_pg2(const FiniteField& f) {
  const auto pts = pg2_coordinates(f);
  std::vector<std::vector<std::uint32_t>> lines(pts.size());
  for (std::size_t l = 0; l < pts.size(); ++l)
    for (std::uint32_t x = 0; x < pts.size(); ++x)
      if (dot(f, pts[l], pts[x]) == 0) lines[l].push_back(x);
  return Geometry("PG(2," + std::to_string(f.q()) + ")", pts.size(), std::move(lines));
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> pg2_flags(const FiniteField& f) {
  const auto pts = pg2_coordinates(f);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> flags;
  for (std::uint32_t x = 0; x < pts.size(); ++x)
    for (std::uint32_t l = 0; l < pts.size(); ++l)
      if (dot(f, pts[l], pts[x]) == 0) flags.emplace_back(x, l);
  return flags;
}

Geometry build_flag_hexagon(const FiniteField& f) {
  const auto flags = pg2_flags(f);
  const auto n = static_cast<std::uint32_t>(f.q() * f.q() + f.q() + 1);
  std::vector<std::vector<std::uint32_t>> lines(2 * n);
  for (std::uint32_t k = 0; k < flags.size(); ++k) {
    lines[flags[k].first].push_back(k);
    lines[n + flags[k].second].push_back(k);
  }
  return Geometry("H(" + std::to_string(f.q()) + ",1)", flags.size(), std::move(lines));
}

Grassmann grassmann(const FiniteField& f, const Vec7& x, const Vec7& y) {
  Grassmann g{};
  bool nonzero = false;
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j) {
      const Elem v = f.sub(f.mul(x[i], y[j]), f.mul(x[j], y[i]));
      g[pair_index(i, j)] = v;
      nonzero = nonzero || v != 0;
    }
  if (!nonzero) throw DomainError("Grassmann coordinates need linearly independent vectors");
  return g;
}

Elem grassmann_coord(const FiniteField& f, const Grassmann& g, int i, int j) {
  if (i == j) throw DomainError("p_ii is not a Grassmann coordinate");
  return i < j ? g[pair_index(i, j)] : f.neg(g[pair_index(j, i)]);
}

nlohmann::json DualSplitCayley::manifest() const {
  return {{"geometry", geometry.name()},
          {"q", q},
          {"irreducible_polynomial", modulus},
          {"quadric", "x0*x4 + x1*x5 + x2*x6 - x3^2"},
          {"num_points", geometry.num_points()},
          {"num_lines", geometry.num_lines()},
          {"line_numbering", "isotropic 1-spaces, normalized (first nonzero coordinate 1), lexicographic"},
          {"point_numbering", "2-spaces by reduced row-echelon basis, lexicographic"},
          {"vertex_numbering", "points first, then lines"}};
}

DualSplitCayley build_dual_split_cayley_model(const FiniteField& f) {
  const int q = f.q();
  if (q != 2 && q != 3 && q != 4)
    throw ConfigError("H(q)^D is supported for q in {2, 3, 4}, got q = " + std::to_string(q));

  DualSplitCayley out{Geometry("", 0, {}), {}, {}, q, f.modulus_string()};
  for (const auto& v : normalized_vectors<7>(f))
    if (eval_quadric(f, v) == 0) out.line_vectors.push_back(v);
  const auto& iso = out.line_vectors;

  std::size_t space = 1;
  for (int i = 0; i < 7; ++i) space *= static_cast<std::size_t>(q);
  std::vector<std::int32_t> index_of(space, -1);
  for (std::size_t k = 0; k < iso.size(); ++k) index_of[vec_key(iso[k], q)] = static_cast<std::int32_t>(k);

  // Conditions p12=p34, p54=p32, p20=p35, p65=p30, p01=p36, p46=p31.
  static constexpr int kConditions[6][4] = {{1, 2, 3, 4}, {5, 4, 3, 2}, {2, 0, 3, 5},
                                           {6, 5, 3, 0}, {0, 1, 3, 6}, {4, 6, 3, 1}};
  std::vector<std::array<Vec7, 2>> spaces;
  for (std::size_t a = 0; a < iso.size(); ++a)
    for (std::size_t b = a + 1; b < iso.size(); ++b) {
      bool isotropic = true;
      for (int lam = 0; lam < q && isotropic; ++lam)
        isotropic = eval_quadric(f, axpy(f, static_cast<Elem>(lam), iso[b], iso[a])) == 0;
      if (!isotropic) continue;
      const Grassmann g = grassmann(f, iso[a], iso[b]);
      bool ok = true;
      for (const auto& c : kConditions)
        ok = ok && grassmann_coord(f, g, c[0], c[1]) == grassmann_coord(f, g, c[2], c[3]);
      if (ok) spaces.push_back(rref(f, iso[a], iso[b]));
    }
  std::sort(spaces.begin(), spaces.end());
  spaces.erase(std::unique(spaces.begin(), spaces.end()), spaces.end());
  out.point_bases = spaces;

  // lines_of_point[k]: the q+1 one-spaces inside 2-space k.
  std::vector<std::vector<std::uint32_t>> lines(iso.size());
  for (std::uint32_t k = 0; k < spaces.size(); ++k) {
    std::vector<Vec7> members{spaces[k][1]};
    for (int lam = 0; lam < q; ++lam) members.push_back(axpy(f, static_cast<Elem>(lam), spaces[k][1], spaces[k][0]));
    for (const auto& v : members) {
      const auto idx = index_of[vec_key(normalize(f, v), q)];
      if (idx < 0) throw InternalError("totally isotropic 2-space contains a non-isotropic vector");
      lines[idx].push_back(k);
    }
  }
  out.geometry = Geometry("H(" + std::to_string(q) + ")^D", spaces.size(), std::move(lines));
  return out;
}

Geometry build_dual_split_cayley(const FiniteField& f) { return build_dual_split_cayley_model(f).geometry; }

Geometry subhex_geometry(const Geometry& h, const SubHex& s) {
  return induced_subgeometry(h, s.point_ids, s.line_ids, h.name() + " subhexagon");
}

SubHex subhexagon_closure(const Geometry& h, LineId l1, LineId l2, std::optional<std::uint64_t> shuffle_seed) {
  const Vertex v1 = h.vertex(l1), v2 = h.vertex(l2);
  if (delta(h, v1, v2) != 6)
    throw DomainError("subhexagon_closure needs two lines at incidence distance 6");

  std::vector<char> member(h.num_vertices(), 0);
  std::vector<Vertex> members, pending;
  std::mt19937_64 rng(shuffle_seed.value_or(0));
  auto add = [&](Vertex v) {
    if (member[v]) return;
    member[v] = 1;
    members.push_back(v);
    pending.push_back(v);
  };
  // Appends the unique geodesic from `from` to `to` (distance < 6).
  auto add_path = [&](Vertex from, Vertex to) {
    const auto row = h.delta_row(to);
    Vertex cur = from;
    while (cur != to) {
      Vertex next = cur;
      for (Vertex w : h.neighbours(cur))
        if (row[w] + 1 == row[cur]) {
          next = w;
          break;
        }
      cur = next;
      add(cur);
    }
  };

  add(v1);
  add(v2);
  while (!pending.empty()) {
    std::size_t pick = pending.size() - 1;
    if (shuffle_seed) pick = std::uniform_int_distribution<std::size_t>(0, pending.size() - 1)(rng);
    const Vertex v = pending[pick];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
    const auto row = h.delta_row(v);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Vertex u = members[k];
      const int d = row[u];
      if (d == 0) continue;
      if (d < 6) {
        add_path(u, v);
      } else if (d == 6 && !h.is_point(u) && !h.is_point(v)) {
        for (Vertex x : h.neighbours(u)) {
          add(x);
          add_path(x, v);
        }
      }
    }
  }

  SubHex s;
  for (Vertex v : members) {
    if (h.is_point(v)) s.point_ids.push_back(v);
    else s.line_ids.push_back(h.as_line(v).index);
  }
  std::sort(s.point_ids.begin(), s.point_ids.end());
  std::sort(s.line_ids.begin(), s.line_ids.end());

  const GPReport rep = validate_gp(subhex_geometry(h, s), 6);
  const int s_amb = static_cast<int>(h.points_on(l1).size()) - 1;
  if (!rep.is_valid || rep.t != 1 || rep.s != s_amb)
    throw InternalError("geodesic closure is not a subhexagon of order (s,1): " + rep.failure);
  return s;
}

std::uint64_t expected_subhexagon_count(int q) {
  const std::uint64_t u = static_cast<std::uint64_t>(q);
  return u * u * u * (1 + u) * (u * u - u + 1) / 2;
}

std::uint64_t expected_subhexagons_per_point(int q) {
  const std::uint64_t u = static_cast<std::uint64_t>(q);
  return (1 + u) * u * u * u / 2;
}

SubhexEnumeration enumerate_subhexagons(const Geometry& h, int q, std::optional<std::size_t> max_closures) {
  const std::size_t nl = h.num_lines();
  std::vector<std::uint64_t> covered((nl * nl + 63) / 64, 0);
  auto is_covered = [&](std::size_t a, std::size_t b) { return (covered[(a * nl + b) / 64] >> ((a * nl + b) % 64)) & 1; };
  auto cover = [&](std::size_t a, std::size_t b) {
    covered[(a * nl + b) / 64] |= std::uint64_t{1} << ((a * nl + b) % 64);
    covered[(b * nl + a) / 64] |= std::uint64_t{1} << ((b * nl + a) % 64);
  };

  SubhexEnumeration out;
  std::set<PointSet> seen;
  for (std::uint32_t a = 0; a < nl; ++a) {
    const auto row = h.delta_row(h.vertex(LineId{a}));
    for (std::uint32_t b = a + 1; b < nl; ++b) {
      if (row[h.vertex(LineId{b})] != 6 || is_covered(a, b)) continue;
      if (max_closures && out.closures >= *max_closures) {
        std::sort(out.subhexagons.begin(), out.subhexagons.end(),
                  [](const SubHex& x, const SubHex& y) { return x.point_ids < y.point_ids; });
        return out;
      }
      SubHex s = subhexagon_closure(h, {a}, {b});
      ++out.closures;
      for (std::size_t i = 0; i < s.line_ids.size(); ++i) {
        const auto r = h.delta_row(h.vertex(LineId{s.line_ids[i]}));
        for (std::size_t j = i + 1; j < s.line_ids.size(); ++j)
          if (r[h.vertex(LineId{s.line_ids[j]})] == 6) cover(s.line_ids[i], s.line_ids[j]);
      }
      if (seen.insert(s.point_ids).second) out.subhexagons.push_back(std::move(s));
    }
  }
  std::sort(out.subhexagons.begin(), out.subhexagons.end(),
            [](const SubHex& x, const SubHex& y) { return x.point_ids < y.point_ids; });
  out.complete = true;

  if (out.subhexagons.size() != expected_subhexagon_count(q))
    throw InternalError("found " + std::to_string(out.subhexagons.size()) + " subhexagons, expected " +
                        std::to_string(expected_subhexagon_count(q)));
  std::vector<std::uint64_t> per_point(h.num_points(), 0);
  for (const auto& s : out.subhexagons)
    for (auto p : s.point_ids) ++per_point[p];
  for (auto c : per_point)
    if (c != expected_subhexagons_per_point(q))
      throw InternalError("a point lies in " + std::to_string(c) + " subhexagons, expected " +
                          std::to_string(expected_subhexagons_per_point(q)));
  return out;
}

SubHex first_subhexagon(const Geometry& h) {
  const auto row = h.delta_row(h.vertex(LineId{0}));
  for (std::uint32_t b = 1; b < h.num_lines(); ++b)
    if (row[h.vertex(LineId{b})] == 6) return subhexagon_closure(h, {0}, {b});
  throw DomainError("no line opposite line 0");
}

PointSet Embedding::map_points(const PointSet& pts) const {
  PointSet out;
  out.reserve(pts.size());
  for (auto p : pts) out.push_back(point_map.at(p));
  std::sort(out.begin(), out.end());
  return out;
}

Embedding embed_isomorphism(const Geometry& abstract, const Geometry& h, const SubHex& s) {
  const Geometry sub = subhex_geometry(h, s);
  const std::size_t n = abstract.num_vertices();
  if (sub.num_points() != abstract.num_points() || sub.num_lines() != abstract.num_lines())
    throw InternalError("subhexagon and abstract hexagon differ in size");

  std::vector<Vertex> order{0};
  std::vector<Vertex> parent(n, 0);
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  for (std::size_t head = 0; head < order.size(); ++head)
    for (Vertex w : abstract.neighbours(order[head]))
      if (!seen[w]) {
        seen[w] = 1;
        parent[w] = order[head];
        order.push_back(w);
      }
  if (order.size() != n) throw InternalError("abstract hexagon is disconnected");

  std::vector<std::int64_t> image(n, -1);
  std::vector<char> used(sub.num_vertices(), 0);

  std::function<bool(std::size_t)> extend = [&](std::size_t k) -> bool {
    if (k == n) return true;
    const Vertex v = order[k];
    const auto arow = abstract.delta_row(v);
    std::vector<Vertex> candidates;
    if (k == 0) {
      candidates.push_back(0);
    } else {
      const auto nb = sub.neighbours(static_cast<Vertex>(image[parent[v]]));
      candidates.assign(nb.begin(), nb.end());
    }
    for (Vertex c : candidates) {
      if (used[c] || sub.is_point(c) != abstract.is_point(v)) continue;
      const auto srow = sub.delta_row(c);
      bool consistent = true;
      for (std::size_t i = 0; i < k && consistent; ++i)
        consistent = arow[order[i]] == srow[image[order[i]]];
      if (!consistent) continue;
      image[v] = c;
      used[c] = 1;
      if (extend(k + 1)) return true;
      used[c] = 0;
      image[v] = -1;
    }
    return false;
  };
  if (!extend(0)) throw InternalError("no isomorphism onto the subhexagon");

  Embedding e;
  e.point_map.resize(abstract.num_points());
  e.line_map.resize(abstract.num_lines());
  for (Vertex v = 0; v < n; ++v) {
    const auto w = static_cast<Vertex>(image[v]);
    if (abstract.is_point(v)) e.point_map[v] = s.point_ids[w];
    else e.line_map[abstract.as_line(v).index] = s.line_ids[sub.as_line(w).index];
  }
  for (std::uint32_t l = 0; l < abstract.num_lines(); ++l) {
    PointSet mapped = e.map_points(abstract.points_on({l}));
    if (mapped != h.points_on({e.line_map[l]}))
      throw InternalError("embedding does not preserve incidence");
  }
  return e;
}

}  // namespace ovoid
