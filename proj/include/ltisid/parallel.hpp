#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ltisid {

// Deterministic data-parallel reduction. The index range is cut into
// fixed-size blocks; each block is reduced serially and the block partials
// are combined in block order. The result therefore depends only on the
// block size and the input, never on the number of OpenMP threads.
inline constexpr std::size_t kReduceBlock = 2048;

template <typename Partial, typename BlockFn, typename CombineFn>
Partial blocked_reduce(std::size_t n, Partial init, BlockFn&& block_fn, CombineFn&& combine) {
  if (n == 0) return init;
  const std::size_t n_blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<Partial> partials(n_blocks, init);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long b = 0; b < static_cast<long long>(n_blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t end = std::min(begin + kReduceBlock, n);
    partials[static_cast<std::size_t>(b)] = block_fn(begin, end);
  }
  Partial acc = init;
  for (const Partial& p : partials) acc = combine(acc, p);
  return acc;
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ltisid
