#include <bit>

#include "ovoid/errors.hpp"
#include "ovoid/exact_cover.hpp"

namespace ovoid {

BigInt permanent_ryser(const std::vector<std::vector<int>>& m) {
  const std::size_t n = m.size();
  for (const auto& r : m)
    if (r.size() != n) throw DomainError("permanent needs a square matrix");
  if (n > 24) throw ResourceError("permanent_ryser supports n <= 24, got n = " + std::to_string(n));
  if (n == 0) return 1;
  for (const auto& r : m)
    for (int v : r)
      if (v < 0 || v > 1) throw DomainError("permanent_ryser expects a 0/1 matrix");

  // perm(A) = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} a_ij, walking the
  // subsets S in Gray-code order. Each product is below 24^24 < 2^111, so a
  // chunk of 1024 terms fits in 128 bits before it is flushed.
  std::vector<std::int64_t> row_sum(n, 0);
  BigInt total = 0;
  __int128 chunk = 0;
  auto flush = [&] {
    const bool neg = chunk < 0;
    const auto mag = neg ? -static_cast<unsigned __int128>(chunk) : static_cast<unsigned __int128>(chunk);
    BigInt part = static_cast<std::uint64_t>(mag >> 64);
    part <<= 64;
    part += static_cast<std::uint64_t>(mag);
    total += neg ? BigInt(-part) : part;
    chunk = 0;
  };
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const int j = std::countr_zero(k);
    const bool added = ((k ^ (k >> 1)) >> j) & 1;
    for (std::size_t i = 0; i < n; ++i) row_sum[i] += added ? m[i][j] : -m[i][j];
    __int128 prod = 1;
    for (std::size_t i = 0; i < n && prod != 0; ++i) prod *= row_sum[i];
    const int size = std::popcount(k ^ (k >> 1));
    chunk += (size % 2 == 0) ? prod : -prod;
    if ((k & 1023) == 0) flush();
  }
  flush();
  return n % 2 == 0 ? total : BigInt(-total);
}

std::vector<std::vector<int>> incidence_matrix(const Geometry& g) {
  std::vector<std::vector<int>> m(g.num_points(), std::vector<int>(g.num_lines(), 0));
  for (std::uint32_t l = 0; l < g.num_lines(); ++l)
    for (auto p : g.points_on({l})) m[p][l] = 1;
  return m;
}

}  // namespace ovoid
