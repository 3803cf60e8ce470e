#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qmm {

inline constexpr int kMaxEnumerationN = 200;
inline constexpr int kMaxEnumerationK = 6;
inline constexpr std::uint64_t kMaxEnumerationSize = 10'000'000;

/// Every count vector (n_1..n_K) with sum N, with log N!/prod n_k!.
struct OutcomeEnumeration {
  int total = 0;
  int outcomes = 0;
  std::vector<int> counts;               // size() * outcomes, row-major
  std::vector<double> counts_real;       // same values as double
  std::vector<double> log_multinomials;  // one per vector

  std::size_t size() const { return log_multinomials.size(); }
  std::span<const int> row(std::size_t i) const {
    return {counts.data() + i * static_cast<std::size_t>(outcomes),
            static_cast<std::size_t>(outcomes)};
  }
};

/// C(N+K-1, K-1), saturating at UINT64_MAX.
std::uint64_t composition_count(int n, int k);

/// Throws InvalidArgument for N < 1 or K < 2, TooLargeError when N > 200,
/// K > 6 or the cardinality exceeds 10^7.
OutcomeEnumeration enumerate_outcomes(int n, int k);

}  // namespace qmm
