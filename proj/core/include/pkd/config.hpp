#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace pkd {

// Tunables governing construction and rebalancing.
struct Config {
  int lambda = 6;            // skeleton height; one sieve round builds 2^lambda buckets
  int sigma = 32;            // oversampling rate; sample size per round is 2^lambda * sigma
  double alpha = 0.3;        // weight-balance slack in [0, 0.5]
  std::size_t phi = 32;      // leaf wrap
  std::size_t seq_cutoff = 1024;  // below this, recursion runs sequentially
  std::uint64_t seed = 1;

  std::size_t bucket_count() const { return std::size_t(1) << lambda; }
  std::size_t sample_size() const { return bucket_count() * std::size_t(sigma); }
  // Chunk size of the sieve's counting matrix.
  std::size_t chunk_size() const { return bucket_count(); }

  void validate() const {
    if (lambda < 1) throw std::invalid_argument("lambda must be >= 1");
    if (sigma < 1) throw std::invalid_argument("sigma must be >= 1");
    if (alpha < 0.0 || alpha > 0.5) throw std::invalid_argument("alpha must be in [0, 0.5]");
    if (phi < 1) throw std::invalid_argument("phi must be >= 1");
    if (seq_cutoff < phi) throw std::invalid_argument("seq_cutoff must be >= phi");
  }
};

}  // namespace pkd
