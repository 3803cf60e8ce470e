#include "qminimax/kernels.hpp"

#include "qminimax/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <unordered_map>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>

namespace qmm {

std::uint64_t composition_count(int n, int k) {
  if (n < 0 || k < 1) return 0;
  unsigned __int128 c = 1;
  for (int i = 1; i < k; ++i) {
    c = c * static_cast<unsigned>(n + i) / static_cast<unsigned>(i);
    if (c > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(c);
}

OutcomeEnumeration enumerate_outcomes(int n, int k) {
  if (n < 1) throw InvalidArgument("enumeration needs N >= 1");
  if (k < 2) throw InvalidArgument("enumeration needs K >= 2");
  const std::uint64_t size = composition_count(n, k);
  if (n > kMaxEnumerationN || k > kMaxEnumerationK || size > kMaxEnumerationSize) {
    throw TooLargeError("outcome enumeration for N=" + std::to_string(n) + ", K=" +
                            std::to_string(k) + " has " + std::to_string(size) +
                            " count vectors (limits: N <= 200, K <= 6, 10^7 vectors)",
                        size);
  }
  OutcomeEnumeration e;
  e.total = n;
  e.outcomes = k;
  e.counts.reserve(size * k);
  e.counts_real.reserve(size * k);
  e.log_multinomials.reserve(size);

  std::vector<double> log_fact(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) log_fact[i] = std::lgamma(i + 1.0);

  // Lexicographically decreasing compositions, starting at (N, 0, ..., 0).
  std::vector<int> c(static_cast<std::size_t>(k), 0);
  c[0] = n;
  while (true) {
    double lm = log_fact[n];
    for (int v : c) {
      e.counts.push_back(v);
      e.counts_real.push_back(v);
      lm -= log_fact[v];
    }
    e.log_multinomials.push_back(lm);
    // Find the rightmost non-last position with a positive count.
    int j = k - 2;
    while (j >= 0 && c[j] == 0) --j;
    if (j < 0) break;
    --c[j];
    const int rest = c[k - 1] + 1;
    c[k - 1] = 0;
    c[j + 1] = rest;
  }
  return e;
}

namespace kernels {

namespace {

// Carries the first exception out of an OpenMP region.
class ExceptionSlot {
 public:
  template <typename F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mutex_;
  std::exception_ptr error_;
};

void store_estimate(const Estimator& estimator, const OutcomeEnumeration& e, std::size_t i,
                    std::vector<double>& out) {
  const auto row = e.row(i);
  const ProbVector est = estimator(CountVector(std::vector<int>(row.begin(), row.end())));
  if (est.size() != e.outcomes) {
    throw InvalidArgument("estimator returned the wrong number of probabilities");
  }
  const std::size_t kk = static_cast<std::size_t>(e.outcomes);
  for (std::size_t k = 0; k < kk; ++k) out[i * kk + k] = est[static_cast<int>(k)];
}

double pairwise_sum_impl(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

struct LogProbs {
  std::array<double, kMaxEnumerationK> logp{};
};

LogProbs log_probs(std::span<const double> p) {
  LogProbs lp;
  for (std::size_t k = 0; k < p.size(); ++k) {
    // A finite stand-in for log 0 keeps 0 * log 0 = 0 while any positive
    // count drives the term far below the cutoff.
    lp.logp[k] = p[k] > 0.0 ? std::log(p[k]) : -1e300;
  }
  return lp;
}

double block_sum(const OutcomeEnumeration& e, std::span<const double> est,
                 std::span<const double> p, const LogProbs& lp, std::size_t begin,
                 std::size_t end) {
  const std::size_t kk = static_cast<std::size_t>(e.outcomes);
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double* n = e.counts_real.data() + i * kk;
    double ll = e.log_multinomials[i];
    for (std::size_t k = 0; k < kk; ++k) ll += n[k] * lp.logp[k];
    if (ll < kLogLikelihoodCutoff) continue;
    const double* q = est.data() + i * kk;
    double err = 0.0;
    for (std::size_t k = 0; k < kk; ++k) {
      const double d = q[k] - p[k];
      err += d * d;
    }
    acc += std::exp(ll) * err;
  }
  return acc;
}

void check_shapes(const OutcomeEnumeration& e, std::span<const double> est,
                  std::span<const double> p) {
  if (p.size() != static_cast<std::size_t>(e.outcomes) ||
      est.size() != e.size() * static_cast<std::size_t>(e.outcomes)) {
    throw InvalidArgument("risk kernel: shape mismatch between enumeration, estimates and state");
  }
}

}  // namespace

std::vector<double> tabulate_estimates_serial(const Estimator& estimator,
                                              const OutcomeEnumeration& outcomes) {
  std::vector<double> out(outcomes.size() * static_cast<std::size_t>(outcomes.outcomes));
  for (std::size_t i = 0; i < outcomes.size(); ++i) store_estimate(estimator, outcomes, i, out);
  return out;
}

std::vector<double> tabulate_estimates_omp(const Estimator& estimator,
                                           const OutcomeEnumeration& outcomes) {
  std::vector<double> out(outcomes.size() * static_cast<std::size_t>(outcomes.outcomes));
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(outcomes.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    slot.run([&] { store_estimate(estimator, outcomes, static_cast<std::size_t>(i), out); });
  }
  slot.rethrow();
  return out;
}

std::vector<double> tabulate_estimates_symmetric(const Estimator& estimator,
                                                 const OutcomeEnumeration& outcomes) {
  const std::size_t k = static_cast<std::size_t>(outcomes.outcomes);
  const std::uint64_t radix = static_cast<std::uint64_t>(outcomes.total) + 1;
  auto key_of = [&](const int* c) {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < k; ++j) key = key * radix + static_cast<std::uint64_t>(c[j]);
    return key;
  };

  std::vector<std::size_t> canonical;
  std::unordered_map<std::uint64_t, std::size_t> slot_of;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const int* c = outcomes.row(i).data();
    if (std::is_sorted(c, c + k, std::greater<int>())) {
      slot_of.emplace(key_of(c), canonical.size());
      canonical.push_back(i);
    }
  }

  std::vector<double> canon(canonical.size() * k);
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(canonical.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    slot.run([&] {
      const std::size_t row = canonical[static_cast<std::size_t>(i)];
      const auto c = outcomes.row(row);
      const ProbVector p = estimator(CountVector(std::vector<int>(c.begin(), c.end())));
      if (static_cast<std::size_t>(p.size()) != k) {
        throw InvalidArgument("estimator returned the wrong number of probabilities");
      }
      std::copy(p.vec().begin(), p.vec().end(), canon.begin() + i * static_cast<std::ptrdiff_t>(k));
    });
  }
  slot.rethrow();

  std::vector<double> out(outcomes.size() * k);
  std::vector<int> perm(k);
  std::vector<int> sorted(k);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const int* c = outcomes.row(i).data();
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [c](int a, int b) { return c[a] > c[b]; });
    for (std::size_t j = 0; j < k; ++j) sorted[j] = c[perm[j]];
    const std::size_t s = slot_of.at(key_of(sorted.data()));
    for (std::size_t j = 0; j < k; ++j) {
      out[i * k + static_cast<std::size_t>(perm[j])] = canon[s * k + j];
    }
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double risk_at(const OutcomeEnumeration& outcomes, std::span<const double> estimates,
               std::span<const double> p, double prefactor) {
  check_shapes(outcomes, estimates, p);
  const LogProbs lp = log_probs(p);
  const std::size_t size = outcomes.size();
  const std::size_t blocks = (size + kRiskBlock - 1) / kRiskBlock;
  std::vector<double> partial(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    partial[b] = block_sum(outcomes, estimates, p, lp, b * kRiskBlock,
                           std::min(size, (b + 1) * kRiskBlock));
  }
  return prefactor * pairwise_sum(partial);
}

double risk_at_omp(const OutcomeEnumeration& outcomes, std::span<const double> estimates,
                   std::span<const double> p, double prefactor) {
  check_shapes(outcomes, estimates, p);
  const LogProbs lp = log_probs(p);
  const std::size_t size = outcomes.size();
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((size + kRiskBlock - 1) / kRiskBlock);
  std::vector<double> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t ub = static_cast<std::size_t>(b);
    partial[ub] = block_sum(outcomes, estimates, p, lp, ub * kRiskBlock,
                            std::min(size, (ub + 1) * kRiskBlock));
  }
  return prefactor * pairwise_sum(partial);
}

std::vector<double> risk_batch_serial(const OutcomeEnumeration& outcomes,
                                      std::span<const double> estimates,
                                      std::span<const double> states, double prefactor) {
  const std::size_t kk = static_cast<std::size_t>(outcomes.outcomes);
  const std::size_t m = states.size() / kk;
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = risk_at(outcomes, estimates, states.subspan(i * kk, kk), prefactor);
  }
  return out;
}

std::vector<double> risk_batch_omp(const OutcomeEnumeration& outcomes,
                                   std::span<const double> estimates,
                                   std::span<const double> states, double prefactor) {
  const std::size_t kk = static_cast<std::size_t>(outcomes.outcomes);
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(states.size() / kk);
  std::vector<double> out(static_cast<std::size_t>(m));
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    out[ui] = risk_at(outcomes, estimates, states.subspan(ui * kk, kk), prefactor);
  }
  return out;
}

std::vector<int> draw_counts(CounterRng& rng, std::span<const double> p, int n) {
  const std::size_t kk = p.size();
  std::array<double, 16> cum{};
  std::vector<int> counts(kk, 0);
  if (kk > cum.size()) throw InvalidArgument("draw_counts supports at most 16 outcomes");
  double run = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < kk; ++k) {
    run += p[k];
    cum[k] = run;
    if (p[k] > 0.0) last_positive = k;
  }
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform() * run;
    std::size_t k = 0;
    while (k < last_positive && !(u < cum[k])) ++k;
    ++counts[k];
  }
  return counts;
}

namespace {

double one_trial(const Estimator& estimator, std::span<const double> p, int n,
                 std::uint64_t seed, std::int64_t t, double prefactor) {
  CounterRng rng(seed, static_cast<std::uint64_t>(t));
  const CountVector counts(draw_counts(rng, p, n));
  const ProbVector est = estimator(counts);
  return squared_error(est.values(), p, prefactor);
}

}  // namespace

std::vector<double> trial_errors_serial(const Estimator& estimator, std::span<const double> p,
                                        int n, std::int64_t trials, std::uint64_t seed,
                                        double prefactor) {
  std::vector<double> out(static_cast<std::size_t>(trials));
  for (std::int64_t t = 0; t < trials; ++t) {
    out[static_cast<std::size_t>(t)] = one_trial(estimator, p, n, seed, t, prefactor);
  }
  return out;
}

std::vector<double> trial_errors_omp(const Estimator& estimator, std::span<const double> p,
                                     int n, std::int64_t trials, std::uint64_t seed,
                                     double prefactor) {
  std::vector<double> out(static_cast<std::size_t>(trials));
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < trials; ++t) {
    slot.run([&] { out[static_cast<std::size_t>(t)] = one_trial(estimator, p, n, seed, t, prefactor); });
  }
  slot.rethrow();
  return out;
}

namespace {

MeanMcSums mean_mc_chunk(std::span<const double> alpha, std::int64_t begin, std::int64_t end,
                         std::uint64_t seed, std::uint64_t chunk, bool indicator) {
  const std::size_t kk = alpha.size();
  CounterRng rng(seed, chunk);
  std::vector<std::gamma_distribution<double>> gammas;
  gammas.reserve(kk);
  for (double a : alpha) gammas.emplace_back(a, 1.0);

  MeanMcSums s;
  s.sum.assign(kk, 0.0);
  s.sum_sq.assign(kk, 0.0);
  std::vector<double> x(kk);
  for (std::int64_t i = begin; i < end; ++i) {
    double total = 0.0;
    for (std::size_t k = 0; k < kk; ++k) {
      x[k] = gammas[k](rng);
      total += x[k];
    }
    double sq = 0.0;
    for (std::size_t k = 0; k < kk; ++k) {
      x[k] /= total;
      sq += x[k] * x[k];
    }
    ++s.drawn;
    if (indicator && sq > 1.0 / 3.0) continue;
    ++s.accepted;
    for (std::size_t k = 0; k < kk; ++k) {
      s.sum[k] += x[k];
      s.sum_sq[k] += x[k] * x[k];
    }
  }
  return s;
}

MeanMcSums merge(const std::vector<MeanMcSums>& parts, std::size_t kk) {
  MeanMcSums total;
  total.sum.assign(kk, 0.0);
  total.sum_sq.assign(kk, 0.0);
  for (const auto& p : parts) {
    total.drawn += p.drawn;
    total.accepted += p.accepted;
    for (std::size_t k = 0; k < kk; ++k) {
      total.sum[k] += p.sum[k];
      total.sum_sq[k] += p.sum_sq[k];
    }
  }
  return total;
}

}  // namespace

MeanMcSums mean_mc_serial(std::span<const double> alpha, std::int64_t samples,
                          std::uint64_t seed, bool indicator) {
  const std::int64_t chunks = (samples + kMeanMcChunk - 1) / kMeanMcChunk;
  std::vector<MeanMcSums> parts(static_cast<std::size_t>(chunks));
  for (std::int64_t c = 0; c < chunks; ++c) {
    parts[static_cast<std::size_t>(c)] =
        mean_mc_chunk(alpha, c * kMeanMcChunk, std::min(samples, (c + 1) * kMeanMcChunk), seed,
                      static_cast<std::uint64_t>(c), indicator);
  }
  return merge(parts, alpha.size());
}

MeanMcSums mean_mc_omp(std::span<const double> alpha, std::int64_t samples, std::uint64_t seed,
                       bool indicator) {
  const std::int64_t chunks = (samples + kMeanMcChunk - 1) / kMeanMcChunk;
  std::vector<MeanMcSums> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < chunks; ++c) {
    parts[static_cast<std::size_t>(c)] =
        mean_mc_chunk(alpha, c * kMeanMcChunk, std::min(samples, (c + 1) * kMeanMcChunk), seed,
                      static_cast<std::uint64_t>(c), indicator);
  }
  return merge(parts, alpha.size());
}

}  // namespace kernels
}  // namespace qmm
