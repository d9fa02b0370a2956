#include <algorithm>
#include <bit>

#include "ovoid/errors.hpp"
#include "ovoid/exact_cover.hpp"

namespace ovoid {

std::string to_string(PackingStatus s) {
  switch (s) {
    case PackingStatus::optimal: return "optimal";
    case PackingStatus::bound_established: return "bound_established";
    case PackingStatus::bound_refuted: return "bound_refuted";
    case PackingStatus::budget_exceeded: return "budget_exceeded";
  }
  return "?";
}

namespace {

using Bits = std::vector<std::uint64_t>;

bool test(const Bits& b, std::uint32_t i) { return (b[i / 64] >> (i % 64)) & 1; }
void set(Bits& b, std::uint32_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }
void reset(Bits& b, std::uint32_t i) { b[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

class PackingSearch {
 public:
  PackingSearch(const HittingInstance& inst, std::optional<std::size_t> target, std::optional<std::uint64_t> max_nodes)
      : inst_(inst), words_((inst.universe_size + 63) / 64), target_(target), max_nodes_(max_nodes) {
    conflicts_.assign(inst.universe_size, Bits(words_, 0));
    for (const auto& b : inst.blocks)
      for (auto p : b)
        for (auto x : b) set(conflicts_[p], x);
    block_count_.assign(inst.blocks.size(), 0);
  }

  PackingOutcome run(const PointSet& forced) {
    Bits cand(words_, 0);
    for (std::uint32_t p = 0; p < inst_.universe_size; ++p) set(cand, p);
    for (auto p : forced) {
      for (std::size_t w = 0; w < words_; ++w) cand[w] &= ~conflicts_[p][w];
      reset(cand, p);
    }
    current_ = forced;
    best_ = forced;
    expand(cand);
    PackingOutcome out;
    out.best = best_;
    std::sort(out.best.begin(), out.best.end());
    out.nodes_expanded = nodes_;
    if (target_ && best_.size() > *target_) out.status = PackingStatus::bound_refuted;
    else if (budget_hit_) out.status = PackingStatus::budget_exceeded;
    else out.status = target_ ? PackingStatus::bound_established : PackingStatus::optimal;
    return out;
  }

 private:
  std::size_t threshold() const { return std::max(best_.size(), target_.value_or(0)); }

  // Orders the candidates into classes that each meet one block, greedily
  // taking the block with most uncovered candidates; class[i] is the number
  // of classes used up to order[i], an upper bound on how many of
  // order[0..i] a packing can contain.
  void cover_by_blocks(const Bits& cand, std::vector<std::uint32_t>& order, std::vector<std::uint32_t>& cls) {
    std::vector<std::uint32_t> members;
    for (std::size_t w = 0; w < words_; ++w)
      for (std::uint64_t bits = cand[w]; bits; bits &= bits - 1)
        members.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits)));
    std::vector<std::uint32_t> touched;
    for (auto p : members)
      for (auto b : inst_.point_to_blocks[p])
        if (block_count_[b]++ == 0) touched.push_back(b);
    std::sort(touched.begin(), touched.end());

    Bits left = cand;
    std::size_t remaining = members.size();
    std::uint32_t colour = 0;
    while (remaining > 0) {
      std::uint32_t pick = 0;
      int most = 0;
      for (auto b : touched)
        if (block_count_[b] > most) {
          most = block_count_[b];
          pick = b;
        }
      if (most <= 1) break;  // every remaining class is a single point
      ++colour;
      for (auto p : inst_.blocks[pick]) {
        if (!test(left, p)) continue;
        reset(left, p);
        --remaining;
        order.push_back(p);
        cls.push_back(colour);
        for (auto b : inst_.point_to_blocks[p]) --block_count_[b];
      }
    }
    for (auto p : members)
      if (test(left, p)) {
        order.push_back(p);
        cls.push_back(++colour);
      }
    for (auto b : touched) block_count_[b] = 0;
  }

  void expand(Bits cand) {
    if (stop_) return;
    if (current_.size() > best_.size()) {
      best_ = current_;
      if (target_ && best_.size() > *target_) {
        stop_ = true;
        return;
      }
    }
    std::vector<std::uint32_t> order, cls;
    cover_by_blocks(cand, order, cls);
    for (std::size_t i = order.size(); i-- > 0;) {
      if (current_.size() + cls[i] <= threshold()) return;
      if (max_nodes_ && nodes_ >= *max_nodes_) {
        budget_hit_ = stop_ = true;
        return;
      }
      ++nodes_;
      const auto v = order[i];
      Bits next(words_);
      for (std::size_t w = 0; w < words_; ++w) next[w] = cand[w] & ~conflicts_[v][w];
      current_.push_back(v);
      expand(std::move(next));
      current_.pop_back();
      if (stop_) return;
      reset(cand, v);
    }
  }

  const HittingInstance& inst_;
  std::size_t words_;
  std::optional<std::size_t> target_;
  std::optional<std::uint64_t> max_nodes_;
  std::vector<Bits> conflicts_;
  std::vector<int> block_count_;
  PointSet current_, best_;
  std::uint64_t nodes_ = 0;
  bool stop_ = false;
  bool budget_hit_ = false;
};

}  // namespace

PackingOutcome max_packing(const HittingInstance& inst, const PointSet& forced, std::optional<std::size_t> target,
                           std::optional<std::uint64_t> max_nodes) {
  if (!inst.is_packing(forced)) throw DomainError("forced points share a block");
  for (std::size_t i = 1; i < forced.size(); ++i)
    if (std::count(forced.begin(), forced.end(), forced[i]) > 1) throw DomainError("forced point repeated");
  PackingSearch search(inst, target, max_nodes);
  PackingOutcome out = search.run(forced);
  if (!inst.is_packing(out.best)) throw InternalError("packing search returned a non-packing");
  return out;
}

}  // namespace ovoid
