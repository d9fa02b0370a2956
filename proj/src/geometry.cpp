#include "ovoid/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ovoid/errors.hpp"

namespace ovoid {

namespace detail {

struct DistanceCache {
  explicit DistanceCache(std::size_t vertices, std::size_t points)
      : incidence_once(vertices), incidence_rows(vertices), point_once(points), point_rows(points) {}

  std::vector<std::once_flag> incidence_once;
  std::vector<std::vector<std::uint16_t>> incidence_rows;
  std::vector<std::once_flag> point_once;
  std::vector<std::vector<std::uint16_t>> point_rows;
};

}  // namespace detail

namespace {

constexpr std::size_t kEagerCacheLimit = 256;

std::vector<std::uint16_t> bfs(const std::vector<std::vector<Vertex>>& adj, Vertex source) {
  std::vector<std::uint16_t> dist(adj.size(), Geometry::kUnreachable);
  std::vector<Vertex> queue;
  queue.reserve(adj.size());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    for (Vertex w : adj[u]) {
      if (dist[w] == Geometry::kUnreachable) {
        dist[w] = static_cast<std::uint16_t>(dist[u] + 1);
        queue.push_back(w);
      }
    }
  }
  return dist;
}

Distance to_distance(std::uint16_t d) {
  if (d == Geometry::kUnreachable) return std::nullopt;
  return static_cast<int>(d);
}

}  // namespace

Geometry::Geometry(std::string name, std::size_t num_points, std::vector<std::vector<std::uint32_t>> lines)
    : name_(std::move(name)), num_points_(num_points), lines_(std::move(lines)) {
  points_to_lines_.resize(num_points_);
  for (std::size_t l = 0; l < lines_.size(); ++l) {
    const auto& pts = lines_[l];
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (pts[k] >= num_points_)
        throw DomainError("line " + std::to_string(l) + " contains point " + std::to_string(pts[k]) +
                          " outside [0, " + std::to_string(num_points_) + ")");
      if (k > 0 && pts[k] <= pts[k - 1])
        throw DomainError("line " + std::to_string(l) + " is not strictly increasing (point " +
                          std::to_string(pts[k]) + ")");
      points_to_lines_[pts[k]].push_back(static_cast<std::uint32_t>(l));
    }
  }
  adjacency_.resize(num_vertices());
  for (std::size_t p = 0; p < num_points_; ++p)
    for (auto l : points_to_lines_[p]) adjacency_[p].push_back(static_cast<Vertex>(num_points_ + l));
  for (std::size_t l = 0; l < lines_.size(); ++l)
    adjacency_[num_points_ + l].assign(lines_[l].begin(), lines_[l].end());

  cache_ = std::make_shared<detail::DistanceCache>(num_vertices(), num_points_);
  if (num_vertices() <= kEagerCacheLimit) {
    for (Vertex v = 0; v < num_vertices(); ++v) delta_row(v);
    for (std::uint32_t p = 0; p < num_points_; ++p) point_graph_row({p});
  }
}

bool Geometry::incident(PointId p, LineId l) const {
  const auto& pts = lines_[l.index];
  return std::binary_search(pts.begin(), pts.end(), p.index);
}

std::span<const std::uint16_t> Geometry::delta_row(Vertex source) const {
  auto& c = *cache_;
  std::call_once(c.incidence_once[source], [&] { c.incidence_rows[source] = bfs(adjacency_, source); });
  return c.incidence_rows[source];
}

std::span<const std::uint16_t> Geometry::point_graph_row(PointId source) const {
  auto& c = *cache_;
  std::call_once(c.point_once[source.index], [&] {
    std::vector<std::uint16_t> dist(num_points_, kUnreachable);
    std::vector<std::uint32_t> queue{source.index};
    dist[source.index] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto y = queue[head];
      for (auto l : points_to_lines_[y])
        for (auto z : lines_[l])
          if (dist[z] == kUnreachable) {
            dist[z] = static_cast<std::uint16_t>(dist[y] + 1);
            queue.push_back(z);
          }
    }
    c.point_rows[source.index] = std::move(dist);
  });
  return c.point_rows[source.index];
}

Distance delta(const Geometry& g, Vertex a, Vertex b) { return to_distance(g.delta_row(a)[b]); }

Distance point_dist(const Geometry& g, PointId x, PointId y) {
  const Distance d = to_distance(g.point_graph_row(x)[y.index]);
#ifndef NDEBUG
  if (const Distance dd = delta(g, x.index, y.index); d.has_value() != dd.has_value() || (d && *dd != 2 * *d))
    throw InternalError("point-graph and incidence-graph distances disagree");
#endif
  return d;
}

Distance point_dist(const Geometry& g, PointId x, LineId l) {
  const auto row = g.point_graph_row(x);
  Distance best;
  for (auto y : g.points_on(l)) {
    const Distance d = to_distance(row[y]);
    if (d && (!best || *d < *best)) best = d;
  }
#ifndef NDEBUG
  if (const Distance dd = delta(g, g.vertex(x), g.vertex(l));
      best.has_value() != dd.has_value() || (best && *dd != 2 * *best + 1))
    throw InternalError("point-graph and incidence-graph distances disagree");
#endif
  return best;
}

Distance point_dist(const Geometry& g, LineId l, PointId x) { return point_dist(g, x, l); }

Distance point_dist(const Geometry& g, LineId l, LineId m) {
  if (l == m) throw DomainError("d(l, l') is defined only for distinct lines");
  Distance best;
  for (auto x : g.points_on(l)) {
    const auto row = g.point_graph_row({x});
    for (auto y : g.points_on(m)) {
      const Distance d = to_distance(row[y]);
      if (d && (!best || *d < *best)) best = d;
    }
  }
#ifndef NDEBUG
  if (const Distance dd = delta(g, g.vertex(l), g.vertex(m));
      best.has_value() != dd.has_value() || (best && *dd != 2 * *best + 2))
    throw InternalError("point-graph and incidence-graph distances disagree");
#endif
  return best;
}

PointSet ball(const Geometry& g, PointId x, int radius) {
  const auto row = g.point_graph_row(x);
  PointSet out;
  for (std::uint32_t y = 0; y < g.num_points(); ++y)
    if (row[y] != Geometry::kUnreachable && row[y] <= radius) out.push_back(y);
  return out;
}

PointSet ball(const Geometry& g, LineId l, int radius) {
  // d(y, l) <= r  iff  delta(l, y) <= 2r + 1
  const auto row = g.delta_row(g.vertex(l));
  PointSet out;
  for (std::uint32_t y = 0; y < g.num_points(); ++y)
    if (row[y] != Geometry::kUnreachable && row[y] <= 2 * radius + 1) out.push_back(y);
  return out;
}

std::optional<int> girth(const Geometry& g) {
  const auto n = g.num_vertices();
  std::optional<int> best;
  std::vector<int> dist(n), parent(n);
  std::vector<Vertex> queue;
  queue.reserve(n);
  for (Vertex root = 0; root < n; ++root) {
    std::fill(dist.begin(), dist.end(), -1);
    queue.clear();
    dist[root] = 0;
    parent[root] = -1;
    queue.push_back(root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex u = queue[head];
      if (best && 2 * dist[u] >= *best) break;
      for (Vertex w : g.neighbours(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          parent[w] = static_cast<int>(u);
          queue.push_back(w);
        } else if (static_cast<int>(w) != parent[u]) {
          const int cycle = dist[u] + dist[w] + 1;
          if (!best || cycle < *best) best = cycle;
        }
      }
    }
  }
  return best;
}

GPReport validate_gp(const Geometry& g, int n) {
  GPReport rep;
  rep.n = n;
  auto fail = [&](std::string why, Vertex a, Vertex b) {
    if (rep.failure.empty()) {
      rep.failure = std::move(why);
      rep.failure_witness = std::make_pair(a, b);
    }
  };
  if (g.num_points() == 0 || g.num_lines() == 0) {
    rep.failure = "geometry has no points or no lines";
    return rep;
  }

  rep.regular = true;
  const std::size_t line_size = g.points_on({0}).size();
  for (std::uint32_t l = 1; l < g.num_lines(); ++l)
    if (g.points_on({l}).size() != line_size) {
      rep.regular = false;
      fail("line sizes differ", g.vertex(LineId{l}), g.vertex(LineId{0}));
      break;
    }
  const std::size_t point_degree = g.lines_through({0}).size();
  for (std::uint32_t p = 1; p < g.num_points(); ++p)
    if (g.lines_through({p}).size() != point_degree) {
      rep.regular = false;
      fail("point degrees differ", g.vertex(PointId{p}), g.vertex(PointId{0}));
      break;
    }
  if (rep.regular) {
    rep.s = static_cast<int>(line_size) - 1;
    rep.t = static_cast<int>(point_degree) - 1;
  }

  int diameter = 0;
  bool connected = true;
  for (Vertex v = 0; v < g.num_vertices() && connected; ++v) {
    const auto row = g.delta_row(v);
    for (Vertex w = 0; w < g.num_vertices(); ++w) {
      if (row[w] == Geometry::kUnreachable) {
        connected = false;
        fail("incidence graph is disconnected", v, w);
        break;
      }
      diameter = std::max<int>(diameter, row[w]);
    }
  }
  if (connected) {
    rep.diameter = diameter;
    if (diameter != n) fail("diameter " + std::to_string(diameter) + " != " + std::to_string(n), 0, 0);
  }
  rep.girth = girth(g);
  if (!rep.girth || *rep.girth != 2 * n)
    fail("girth " + (rep.girth ? std::to_string(*rep.girth) : std::string("infinite")) +
             " != " + std::to_string(2 * n),
         0, 0);

  if (connected && n % 2 == 0) {
    const int d = n / 2;
    rep.axiom1_ok = true;
    rep.axiom2_ok = true;
    for (std::uint32_t x = 0; x < g.num_points(); ++x) {
      const auto row = g.point_graph_row({x});
      for (std::uint32_t l = 0; l < g.num_lines() && *rep.axiom1_ok; ++l) {
        const auto& pts = g.points_on({l});
        int m = Geometry::kUnreachable;
        for (auto y : pts) m = std::min<int>(m, row[y]);
        int at_min = 0;
        bool rest_ok = true;
        for (auto y : pts) {
          if (row[y] == m) ++at_min;
          else if (row[y] != m + 1) rest_ok = false;
        }
        if (at_min != 1 || !rest_ok) {
          rep.axiom1_ok = false;
          fail("point-graph axiom (1) fails", x, g.vertex(LineId{l}));
        }
      }
      for (std::uint32_t y = 0; y < g.num_points() && *rep.axiom2_ok; ++y) {
        const int i = row[y];
        if (i < 1 || i >= d) continue;
        int closer = 0;
        for (auto l : g.lines_through({y}))
          for (auto z : g.points_on({l}))
            if (z != y && row[z] == i - 1) ++closer;
        if (closer != 1) {
          rep.axiom2_ok = false;
          fail("point-graph axiom (2) fails", x, y);
        }
      }
    }
  }

  rep.is_valid = rep.regular && rep.diameter == n && rep.girth == 2 * n;
  if (rep.is_valid) rep.failure_witness.reset();
  return rep;
}

Geometry dualize(const Geometry& g) {
  std::vector<std::vector<std::uint32_t>> lines(g.num_points());
  for (std::uint32_t p = 0; p < g.num_points(); ++p) lines[p] = g.lines_through({p});
  std::string name = g.name();
  if (name.size() > 2 && name.ends_with("^D")) name.resize(name.size() - 2);
  else name += "^D";
  return Geometry(std::move(name), g.num_lines(), std::move(lines));
}

Geometry induced_subgeometry(const Geometry& g, std::span<const std::uint32_t> points,
                             std::span<const std::uint32_t> lines, std::string name) {
  std::vector<std::int64_t> local(g.num_points(), -1);
  for (std::size_t i = 0; i < points.size(); ++i) local[points[i]] = static_cast<std::int64_t>(i);
  std::vector<std::vector<std::uint32_t>> sub_lines;
  sub_lines.reserve(lines.size());
  for (auto l : lines) {
    std::vector<std::uint32_t> pts;
    for (auto p : g.points_on({l}))
      if (local[p] >= 0) pts.push_back(static_cast<std::uint32_t>(local[p]));
    std::sort(pts.begin(), pts.end());
    sub_lines.push_back(std::move(pts));
  }
  return Geometry(std::move(name), points.size(), std::move(sub_lines));
}

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n'));
}

// Text line numbers of the inner arrays of the top-level "lines" array,
// assuming the only nested arrays in the document are those.
std::vector<std::size_t> inner_array_lines(const std::string& text) {
  std::vector<std::size_t> out;
  int depth = 0;
  bool in_string = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') ++line;
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{' || c == '[') {
      if (c == '[' && depth == 2) out.push_back(line);
      ++depth;
    } else if (c == '}' || c == ']') --depth;
  }
  return out;
}

}  // namespace

Geometry parse_geometry(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_of_offset(text, e.byte));
  }
  if (!doc.is_object()) throw ParseError("geometry file must contain a JSON object", 1);
  auto field = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'", 1);
    return doc.at(key);
  };
  const auto& version = field("format_version");
  if (!version.is_number_integer() || version.get<int>() != 1)
    throw ParseError("unsupported format_version (expected 1)", 1);
  const auto& name = field("name");
  if (!name.is_string()) throw ParseError("'name' must be a string", 1);
  const auto& np = field("num_points");
  if (!np.is_number_integer() || np.get<std::int64_t>() < 0)
    throw ParseError("'num_points' must be a nonnegative integer", 1);
  const auto num_points = np.get<std::uint64_t>();
  const auto& jl = field("lines");
  if (!jl.is_array()) throw ParseError("'lines' must be an array", 1);

  const auto positions = inner_array_lines(text);
  std::vector<std::vector<std::uint32_t>> lines;
  lines.reserve(jl.size());
  for (std::size_t k = 0; k < jl.size(); ++k) {
    const std::size_t at = k < positions.size() ? positions[k] : 0;
    const auto& entry = jl[k];
    if (!entry.is_array()) throw ParseError("lines[" + std::to_string(k) + "] is not an array", at);
    std::vector<std::uint32_t> pts;
    for (const auto& v : entry) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw ParseError("lines[" + std::to_string(k) + "] holds a non-index value", at);
      const auto p = v.get<std::uint64_t>();
      if (p >= num_points)
        throw ParseError("lines[" + std::to_string(k) + "] point " + std::to_string(p) + " out of range", at);
      if (!pts.empty() && p == pts.back())
        throw ParseError("lines[" + std::to_string(k) + "] repeats point " + std::to_string(p), at);
      if (!pts.empty() && p < pts.back())
        throw ParseError("lines[" + std::to_string(k) + "] is not strictly increasing", at);
      pts.push_back(static_cast<std::uint32_t>(p));
    }
    lines.push_back(std::move(pts));
  }
  return Geometry(name.get<std::string>(), num_points, std::move(lines));
}

Geometry load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_geometry(ss.str());
}

std::string geometry_to_json(const Geometry& g) {
  std::ostringstream os;
  os << "{\n  \"format_version\": 1,\n  \"name\": " << nlohmann::json(g.name()).dump()
     << ",\n  \"num_points\": " << g.num_points() << ",\n  \"lines\": [";
  for (std::size_t l = 0; l < g.num_lines(); ++l) {
    os << (l ? ",\n    [" : "\n    [");
    const auto& pts = g.lines()[l];
    for (std::size_t k = 0; k < pts.size(); ++k) os << (k ? "," : "") << pts[k];
    os << "]";
  }
  os << (g.num_lines() ? "\n  ]\n}\n" : "]\n}\n");
  return os.str();
}

void save_geometry(const Geometry& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot write " + path.string());
  out << geometry_to_json(g);
  if (!out) throw ResourceError("write failed for " + path.string());
}

}  // namespace ovoid
