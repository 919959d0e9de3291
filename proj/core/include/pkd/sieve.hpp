#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pkd/parallel.hpp"
#include "pkd/skeleton.hpp"

namespace pkd {

// Contiguous per-bucket slices of a permuted point sequence.
// Slice j of the destination buffer is [offsets[j], offsets[j+1]).
struct BucketPartition {
  std::vector<std::size_t> offsets;

  std::size_t bucket_size(int j) const { return offsets[j + 1] - offsets[j]; }
  std::size_t range_size(int lo, int hi) const { return offsets[hi] - offsets[lo]; }
};

// One-round redistribution of src into dst: per-chunk bucket counting,
// column-major exclusive prefix sum of the count matrix, then a
// distribution pass. Chunks run in parallel with sequential bodies, so
// the permutation is stable per bucket and independent of thread count.
template <class Coord, int D>
BucketPartition sieve(std::span<const Point<Coord, D>> src, std::span<Point<Coord, D>> dst,
                      const Skeleton<Coord, D>& sk, std::size_t chunk,
                      bool parallel = true) {
  const std::size_t n = src.size();
  const int nb = sk.num_buckets;
  BucketPartition part;
  part.offsets.assign(std::size_t(nb) + 1, 0);
  if (n == 0) return part;

  const std::size_t nchunks = (n + chunk - 1) / chunk;
  // Count matrix, row-major [chunk][bucket]; later overwritten in place
  // by the running write cursors.
  std::vector<std::uint64_t> cnt(nchunks * std::size_t(nb), 0);

  par_for(0, nchunks, parallel ? 4 : nchunks, [&](std::size_t i) {
    std::uint64_t* row = cnt.data() + i * nb;
    const std::size_t end = std::min(n, (i + 1) * chunk);
    for (std::size_t p = i * chunk; p < end; ++p) row[sk.locate(src[p])]++;
  });

  // Column-major exclusive prefix sum, computed blocked: per-block
  // column sums, a serial scan over blocks, then per-block sweeps.
  const std::size_t nblocks = std::min<std::size_t>(parallel ? 64 : 1, nchunks);
  const std::size_t rows_per_block = (nchunks + nblocks - 1) / nblocks;
  std::vector<std::uint64_t> block_col(nblocks * std::size_t(nb), 0);
  par_for(0, nblocks, 1, [&](std::size_t b) {
    std::uint64_t* acc = block_col.data() + b * nb;
    const std::size_t lo = b * rows_per_block, hi = std::min(nchunks, lo + rows_per_block);
    for (std::size_t i = lo; i < hi; ++i) {
      const std::uint64_t* row = cnt.data() + i * nb;
      for (int j = 0; j < nb; ++j) acc[j] += row[j];
    }
  });

  std::vector<std::uint64_t> col_total(nb, 0);
  for (int j = 0; j < nb; ++j)
    for (std::size_t b = 0; b < nblocks; ++b) col_total[j] += block_col[b * nb + j];
  std::vector<std::uint64_t> bucket_start(nb + 1, 0);
  for (int j = 0; j < nb; ++j) bucket_start[j + 1] = bucket_start[j] + col_total[j];

  // Exclusive scan over blocks per column, leaving block_col[b][j] as
  // the first write position of block b in bucket j.
  for (int j = 0; j < nb; ++j) {
    std::uint64_t run = bucket_start[j];
    for (std::size_t b = 0; b < nblocks; ++b) {
      std::uint64_t c = block_col[b * nb + j];
      block_col[b * nb + j] = run;
      run += c;
    }
  }

  par_for(0, nblocks, 1, [&](std::size_t b) {
    const std::uint64_t* base = block_col.data() + b * nb;
    std::vector<std::uint64_t> run(base, base + nb);
    const std::size_t lo = b * rows_per_block, hi = std::min(nchunks, lo + rows_per_block);
    for (std::size_t i = lo; i < hi; ++i) {
      std::uint64_t* row = cnt.data() + i * nb;
      for (int j = 0; j < nb; ++j) {
        std::uint64_t c = row[j];
        row[j] = run[j];
        run[j] += c;
      }
    }
  });

  par_for(0, nchunks, parallel ? 4 : nchunks, [&](std::size_t i) {
    std::uint64_t* row = cnt.data() + i * nb;
    const std::size_t end = std::min(n, (i + 1) * chunk);
    for (std::size_t p = i * chunk; p < end; ++p) {
      int j = sk.locate(src[p]);
      dst[row[j]++] = src[p];
    }
  });

  for (int j = 0; j <= nb; ++j) part.offsets[j] = bucket_start[j];
  return part;
}

}  // namespace pkd
