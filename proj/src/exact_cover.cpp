#include "ovoid/exact_cover.hpp"

#include <algorithm>

#include "ovoid/errors.hpp"

namespace ovoid {

HittingInstance HittingInstance::make(std::size_t universe_size, std::vector<PointSet> blocks, std::string origin) {
  HittingInstance inst;
  inst.universe_size = universe_size;
  inst.origin = std::move(origin);
  inst.point_to_blocks.resize(universe_size);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    if (b.empty()) throw DomainError("block " + std::to_string(k) + " is empty");
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i] >= universe_size) throw DomainError("block " + std::to_string(k) + " has a point out of range");
      if (i > 0 && b[i] <= b[i - 1]) throw DomainError("block " + std::to_string(k) + " is not strictly increasing");
      inst.point_to_blocks[b[i]].push_back(static_cast<std::uint32_t>(k));
    }
  }
  inst.blocks = std::move(blocks);
  return inst;
}

bool HittingInstance::is_packing(std::span<const std::uint32_t> set) const {
  std::vector<int> hits(blocks.size(), 0);
  for (auto p : set) {
    if (p >= universe_size) return false;
    for (auto b : point_to_blocks[p])
      if (++hits[b] > 1) return false;
  }
  return true;
}

bool HittingInstance::is_exact_hitting_set(std::span<const std::uint32_t> set) const {
  std::vector<int> hits(blocks.size(), 0);
  for (auto p : set) {
    if (p >= universe_size) return false;
    for (auto b : point_to_blocks[p]) ++hits[b];
  }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

HittingInstance build_hitting_instance(const Geometry& g, int j) {
  if (g.num_vertices() == 0) throw DomainError("empty geometry");
  int ecc = 0;
  for (auto d : g.delta_row(0)) {
    if (d == Geometry::kUnreachable) throw DomainError("geometry is disconnected");
    ecc = std::max<int>(ecc, d);
  }
  if (ecc % 2 != 0) throw DomainError("distance-j ovoids need a generalized 2d-gon");
  const int d = ecc / 2;
  if (j < 2 || j > d)
    throw DomainError("j = " + std::to_string(j) + " outside [2, " + std::to_string(d) + "]");

  std::vector<PointSet> blocks;
  if (j % 2 == 0) {
    for (std::uint32_t l = 0; l < g.num_lines(); ++l) blocks.push_back(ball(g, LineId{l}, (j - 2) / 2));
  } else {
    for (std::uint32_t p = 0; p < g.num_points(); ++p) blocks.push_back(ball(g, PointId{p}, (j - 1) / 2));
  }
  return HittingInstance::make(g.num_points(), std::move(blocks), g.name() + ", j=" + std::to_string(j));
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solution_found: return "solution_found";
    case SolveStatus::exhausted_no_solution: return "exhausted_no_solution";
    case SolveStatus::budget_exceeded: return "budget_exceeded";
  }
  return "?";
}

namespace {

// Dancing links over columns = blocks and rows = points.
class Dlx {
 public:
  explicit Dlx(const HittingInstance& inst) : ncols_(static_cast<int>(inst.blocks.size())) {
    const int header_count = ncols_ + 1;
    L.resize(header_count);
    R.resize(header_count);
    U.resize(header_count);
    D.resize(header_count);
    C.resize(header_count);
    row.assign(header_count, -1);
    S.assign(header_count, 0);
    for (int c = 0; c < header_count; ++c) {
      L[c] = c == 0 ? ncols_ : c - 1;
      R[c] = c == ncols_ ? 0 : c + 1;
      U[c] = D[c] = C[c] = c;
    }
    row_first_.assign(inst.universe_size, -1);
    for (std::uint32_t p = 0; p < inst.universe_size; ++p) {
      int first = -1;
      for (auto b : inst.point_to_blocks[p]) {
        const int c = static_cast<int>(b) + 1;
        const int x = static_cast<int>(L.size());
        L.push_back(x);
        R.push_back(x);
        C.push_back(c);
        row.push_back(static_cast<int>(p));
        U.push_back(U[c]);
        D.push_back(c);
        D[U[c]] = x;
        U[c] = x;
        ++S[c];
        if (first < 0) {
          first = x;
        } else {
          L[x] = L[first];
          R[x] = first;
          R[L[first]] = x;
          L[first] = x;
        }
      }
      row_first_[p] = first;
    }
  }

  void force(std::uint32_t p) {
    const int r = row_first_[p];
    if (r < 0) return;
    cover(C[r]);
    for (int j = R[r]; j != r; j = R[j]) cover(C[j]);
  }

  SolveOutcome run(const PointSet& forced, const std::function<bool(const PointSet&)>& sink, SearchLimits limits) {
    limits_ = limits;
    sink_ = &sink;
    chosen_ = forced;
    search();
    out_.exhausted = !stopped_;
    if (out_.solution_count > 0) out_.status = SolveStatus::solution_found;
    else if (budget_hit_) out_.status = SolveStatus::budget_exceeded;
    else out_.status = SolveStatus::exhausted_no_solution;
    return out_;
  }

 private:
  void cover(int c) {
    L[R[c]] = L[c];
    R[L[c]] = R[c];
    for (int i = D[c]; i != c; i = D[i])
      for (int j = R[i]; j != i; j = R[j]) {
        U[D[j]] = U[j];
        D[U[j]] = D[j];
        --S[C[j]];
      }
  }

  void uncover(int c) {
    for (int i = U[c]; i != c; i = U[i])
      for (int j = L[i]; j != i; j = L[j]) {
        ++S[C[j]];
        U[D[j]] = j;
        D[U[j]] = j;
      }
    L[R[c]] = c;
    R[L[c]] = c;
  }

  void search() {
    if (R[0] == 0) {
      PointSet sol = chosen_;
      std::sort(sol.begin(), sol.end());
      ++out_.solution_count;
      if (!(*sink_)(sol) || (limits_.max_solutions && out_.solution_count >= *limits_.max_solutions))
        stopped_ = true;
      return;
    }
    int c = R[0];
    for (int j = R[c]; j != 0; j = R[j])
      if (S[j] < S[c]) c = j;
    if (S[c] == 0) return;
    cover(c);
    for (int r = D[c]; r != c && !stopped_; r = D[r]) {
      if (limits_.max_nodes && out_.nodes_expanded >= *limits_.max_nodes) {
        budget_hit_ = stopped_ = true;
        break;
      }
      ++out_.nodes_expanded;
      chosen_.push_back(static_cast<std::uint32_t>(row[r]));
      for (int j = R[r]; j != r; j = R[j]) cover(C[j]);
      search();
      for (int j = L[r]; j != r; j = L[j]) uncover(C[j]);
      chosen_.pop_back();
    }
    uncover(c);
  }

  int ncols_;
  std::vector<int> L, R, U, D, C, row, S;
  std::vector<int> row_first_;
  PointSet chosen_;
  SearchLimits limits_;
  const std::function<bool(const PointSet&)>* sink_ = nullptr;
  SolveOutcome out_;
  bool stopped_ = false;
  bool budget_hit_ = false;
};

void check_forced(const HittingInstance& inst, const PointSet& forced) {
  std::vector<int> hits(inst.blocks.size(), 0);
  for (std::size_t i = 0; i < forced.size(); ++i) {
    const auto p = forced[i];
    if (p >= inst.universe_size) throw DomainError("forced point " + std::to_string(p) + " out of range");
    for (std::size_t k = 0; k < i; ++k)
      if (forced[k] == p) throw DomainError("forced point " + std::to_string(p) + " repeated");
    for (auto b : inst.point_to_blocks[p])
      if (++hits[b] > 1) throw DomainError("forced points share block " + std::to_string(b));
  }
}

}  // namespace

SolveOutcome dlx_enumerate(const HittingInstance& inst, const PointSet& forced,
                           const std::function<bool(const PointSet&)>& on_solution, SearchLimits limits) {
  check_forced(inst, forced);
  Dlx dlx(inst);
  for (auto p : forced) dlx.force(p);
  return dlx.run(forced, on_solution, limits);
}

SolveOutcome dlx_solve(const HittingInstance& inst, const PointSet& forced, SearchLimits limits) {
  std::vector<PointSet> found;
  SolveOutcome out = dlx_enumerate(
      inst, forced,
      [&](const PointSet& s) {
        if (!inst.is_exact_hitting_set(s)) throw InternalError("dancing links returned a non-solution");
        found.push_back(s);
        return true;
      },
      limits);
  out.solutions = std::move(found);
  return out;
}

HittingInstance matching_instance(const Geometry& g) {
  if (g.num_points() != g.num_lines())
    throw DomainError("perfect matchings need equally many points and lines");
  std::vector<PointSet> blocks(g.num_points() + g.num_lines());
  std::uint32_t edge = 0;
  for (std::uint32_t p = 0; p < g.num_points(); ++p)
    for (auto l : g.lines_through({p})) {
      blocks[p].push_back(edge);
      blocks[g.num_points() + l].push_back(edge);
      ++edge;
    }
  for (auto& b : blocks)
    if (b.empty()) throw DomainError("a vertex of the incidence graph has no edges; no perfect matching");
  return HittingInstance::make(edge, std::move(blocks), g.name() + " incidence matchings");
}

SolveOutcome matchings_iterator(const Geometry& g, const std::function<bool(const PointSet&)>& on_matching,
                                SearchLimits limits) {
  return dlx_enumerate(matching_instance(g), {}, on_matching, limits);
}

}  // namespace ovoid
