#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace pdbench {

/// Pooled ascending ranks (smallest value gets rank 1, ties share the mean of
/// their positions). Rank sums and the tests below are invariant under a
/// reversal of the ranking direction.
struct RankedSamples {
  std::size_t k = 0;
  std::vector<std::size_t> n_per_group;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> ranks;
  std::vector<double> group_mean_ranks;
  /// Sizes of the tie blocks in the pooled sample (only blocks of size > 1).
  std::vector<std::size_t> tie_sizes;

  std::size_t total() const;
  bool equal_sizes() const;
};

/// Throws std::invalid_argument when fewer than two observations are given
/// or a value is not finite.
RankedSamples rank_all(const std::vector<std::vector<double>>& samples);

struct KruskalWallis {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  bool tie_corrected = false;
};

/// H = 12/(N(N+1)) * sum n_j * Rbar_j^2 - 3(N+1), with p from the chi-square
/// survival function on k-1 degrees of freedom. With `tie_correction` H is
/// divided by 1 - sum(t^3 - t)/(N^3 - N). Throws DegenerateData if all values
/// are identical and std::invalid_argument for fewer than two groups.
KruskalWallis kruskal_wallis(const RankedSamples& r, bool tie_correction = false);

struct Posthoc {
  double alpha = 0.05;
  /// Standard-normal quantile at upper tail alpha / (k(k-1)).
  double z = 0.0;
  /// Critical difference of mean ranks for equal group sizes; for unequal
  /// sizes use `critical`.
  double critical_value = 0.0;
  std::vector<std::vector<double>> critical;
  std::vector<std::vector<double>> difference;
  std::vector<std::vector<bool>> significant;
  bool unequal_groups = false;
};

/// Pair (i, j) is significant iff |Rbar_i - Rbar_j| >=
/// z * sqrt(N(N+1)/12 * (1/n_i + 1/n_j)). With equal sizes this is the usual
/// 2/n form; unequal sizes are flagged.
Posthoc posthoc_pairwise(const RankedSamples& r, double alpha = 0.05);

struct Jonckheere {
  double J = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double z = 0.0;
  /// One-sided p-value for an increasing trend along the given order.
  double p_increasing = 1.0;
  /// One-sided p-value for a decreasing trend.
  double p_decreasing = 1.0;
  double p_two_sided = 1.0;
  /// Exact permutation p-values, present when requested and N <= 12.
  std::optional<double> exact_p_increasing;
  std::optional<double> exact_p_decreasing;
};

/// J = sum over i < j of #{(x, y) : x in sample i, y in sample j, x < y},
/// ties counted 1/2. Normal approximation with null mean (N^2 - sum n^2)/4
/// and the tie-corrected null variance. Throws std::invalid_argument for
/// fewer than two samples or an empty sample.
Jonckheere jonckheere(const std::vector<std::vector<double>>& samples, bool exact = false);

/// Upper-tail chi-square probability.
double chi_square_sf(double x, double df);
/// Standard normal CDF and its upper-tail inverse.
double normal_cdf(double z);
double normal_upper_quantile(double p);

}  // namespace pdbench
