#include "pdbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "pdbench/errors.hpp"

namespace pdbench {

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

double normal_cdf(double z) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), z);
}

double normal_upper_quantile(double p) {
  return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), p));
}

std::size_t RankedSamples::total() const {
  return std::accumulate(n_per_group.begin(), n_per_group.end(), std::size_t{0});
}

bool RankedSamples::equal_sizes() const {
  return std::adjacent_find(n_per_group.begin(), n_per_group.end(), std::not_equal_to<>()) ==
         n_per_group.end();
}

RankedSamples rank_all(const std::vector<std::vector<double>>& samples) {
  struct Obs {
    double v;
    std::size_t g, i;
  };
  std::vector<Obs> pooled;
  for (std::size_t g = 0; g < samples.size(); ++g)
    for (std::size_t i = 0; i < samples[g].size(); ++i) {
      if (!std::isfinite(samples[g][i])) throw std::invalid_argument("rank_all: non-finite value");
      pooled.push_back({samples[g][i], g, i});
    }
  if (pooled.size() < 2) throw std::invalid_argument("rank_all: need at least two observations");
  std::stable_sort(pooled.begin(), pooled.end(), [](const Obs& a, const Obs& b) { return a.v < b.v; });

  RankedSamples r;
  r.k = samples.size();
  r.values = samples;
  r.ranks.resize(r.k);
  for (std::size_t g = 0; g < r.k; ++g) {
    r.n_per_group.push_back(samples[g].size());
    r.ranks[g].assign(samples[g].size(), 0.0);
  }
  for (std::size_t lo = 0; lo < pooled.size();) {
    std::size_t hi = lo;
    while (hi + 1 < pooled.size() && pooled[hi + 1].v == pooled[lo].v) ++hi;
    double rank = (static_cast<double>(lo + 1) + static_cast<double>(hi + 1)) / 2.0;
    for (std::size_t p = lo; p <= hi; ++p) r.ranks[pooled[p].g][pooled[p].i] = rank;
    if (hi > lo) r.tie_sizes.push_back(hi - lo + 1);
    lo = hi + 1;
  }
  for (std::size_t g = 0; g < r.k; ++g) {
    const auto& rk = r.ranks[g];
    r.group_mean_ranks.push_back(
        rk.empty() ? 0.0 : std::accumulate(rk.begin(), rk.end(), 0.0) / static_cast<double>(rk.size()));
  }
  return r;
}

KruskalWallis kruskal_wallis(const RankedSamples& r, bool tie_correction) {
  if (r.k < 2) throw std::invalid_argument("kruskal_wallis: need at least two groups");
  double n = static_cast<double>(r.total());
  if (r.tie_sizes.size() == 1 && r.tie_sizes[0] == r.total())
    throw DegenerateData("kruskal_wallis: all values are identical");

  double sum = 0.0;
  for (std::size_t g = 0; g < r.k; ++g)
    sum += static_cast<double>(r.n_per_group[g]) * r.group_mean_ranks[g] * r.group_mean_ranks[g];
  KruskalWallis out;
  out.statistic = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
  if (tie_correction && !r.tie_sizes.empty()) {
    double t3 = 0.0;
    for (std::size_t t : r.tie_sizes) {
      double td = static_cast<double>(t);
      t3 += td * td * td - td;
    }
    out.statistic /= 1.0 - t3 / (n * n * n - n);
    out.tie_corrected = true;
  }
  // Guard against -1e-15 style rounding for identical mean ranks.
  out.statistic = std::max(out.statistic, 0.0);
  std::size_t nonempty = static_cast<std::size_t>(
      std::count_if(r.n_per_group.begin(), r.n_per_group.end(), [](std::size_t c) { return c > 0; }));
  out.df = nonempty - 1;
  out.p_value = out.df == 0 ? 1.0 : chi_square_sf(out.statistic, static_cast<double>(out.df));
  return out;
}

Posthoc posthoc_pairwise(const RankedSamples& r, double alpha) {
  if (r.k < 2) throw std::invalid_argument("posthoc_pairwise: need at least two groups");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("posthoc_pairwise: alpha outside (0, 1)");
  Posthoc out;
  out.alpha = alpha;
  double k = static_cast<double>(r.k);
  out.z = normal_upper_quantile(alpha / (k * (k - 1.0)));
  double n = static_cast<double>(r.total());
  double scale = n * (n + 1.0) / 12.0;
  out.unequal_groups = !r.equal_sizes();
  double n0 = static_cast<double>(r.n_per_group.front());
  out.critical_value = n0 > 0 ? out.z * std::sqrt(scale * 2.0 / n0) : 0.0;

  out.critical.assign(r.k, std::vector<double>(r.k, 0.0));
  out.difference.assign(r.k, std::vector<double>(r.k, 0.0));
  out.significant.assign(r.k, std::vector<bool>(r.k, false));
  for (std::size_t i = 0; i < r.k; ++i)
    for (std::size_t j = 0; j < r.k; ++j) {
      if (i == j || r.n_per_group[i] == 0 || r.n_per_group[j] == 0) continue;
      double inv = 1.0 / static_cast<double>(r.n_per_group[i]) +
                   1.0 / static_cast<double>(r.n_per_group[j]);
      out.critical[i][j] = out.z * std::sqrt(scale * inv);
      out.difference[i][j] = std::abs(r.group_mean_ranks[i] - r.group_mean_ranks[j]);
      out.significant[i][j] = out.difference[i][j] >= out.critical[i][j];
    }
  return out;
}

namespace {

double j_statistic(const std::vector<std::vector<double>>& s) {
  double j = 0.0;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b)
      for (double x : s[a])
        for (double y : s[b]) j += x < y ? 1.0 : (x == y ? 0.5 : 0.0);
  return j;
}

// Enumerates every distinct assignment of the pooled values to groups of the
// given sizes and counts how often J is at least / at most the observed one.
void exact_tails(const std::vector<std::vector<double>>& samples, double observed,
                 double& upper, double& lower) {
  std::vector<double> pooled;
  std::vector<std::size_t> sizes;
  for (const auto& s : samples) {
    pooled.insert(pooled.end(), s.begin(), s.end());
    sizes.push_back(s.size());
  }
  std::vector<std::size_t> label(pooled.size());
  std::vector<std::size_t> left = sizes;
  double ge = 0.0, le = 0.0, total = 0.0;
  const double eps = 1e-9;
  std::function<void(std::size_t)> rec = [&](std::size_t pos) {
    if (pos == pooled.size()) {
      std::vector<std::vector<double>> g(sizes.size());
      for (std::size_t p = 0; p < pooled.size(); ++p) g[label[p]].push_back(pooled[p]);
      double j = j_statistic(g);
      total += 1.0;
      if (j >= observed - eps) ge += 1.0;
      if (j <= observed + eps) le += 1.0;
      return;
    }
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      if (left[g] == 0) continue;
      --left[g];
      label[pos] = g;
      rec(pos + 1);
      ++left[g];
    }
  };
  rec(0);
  upper = ge / total;
  lower = le / total;
}

}  // namespace

Jonckheere jonckheere(const std::vector<std::vector<double>>& samples, bool exact) {
  if (samples.size() < 2) throw std::invalid_argument("jonckheere: need at least two samples");
  for (const auto& s : samples)
    if (s.empty()) throw std::invalid_argument("jonckheere: empty sample");

  Jonckheere out;
  out.J = j_statistic(samples);

  RankedSamples r = rank_all(samples);
  double n = static_cast<double>(r.total());
  double sum_n2 = 0.0, a_groups = 0.0, b_groups = 0.0, c_groups = 0.0;
  for (std::size_t c : r.n_per_group) {
    double m = static_cast<double>(c);
    sum_n2 += m * m;
    a_groups += m * (m - 1.0) * (2.0 * m + 5.0);
    b_groups += m * (m - 1.0) * (m - 2.0);
    c_groups += m * (m - 1.0);
  }
  double a_ties = 0.0, b_ties = 0.0, c_ties = 0.0;
  for (std::size_t t : r.tie_sizes) {
    double m = static_cast<double>(t);
    a_ties += m * (m - 1.0) * (2.0 * m + 5.0);
    b_ties += m * (m - 1.0) * (m - 2.0);
    c_ties += m * (m - 1.0);
  }
  out.mean = (n * n - sum_n2) / 4.0;
  out.variance = (n * (n - 1.0) * (2.0 * n + 5.0) - a_groups - a_ties) / 72.0;
  if (n > 2.0) out.variance += b_groups * b_ties / (36.0 * n * (n - 1.0) * (n - 2.0));
  out.variance += c_groups * c_ties / (8.0 * n * (n - 1.0));

  if (out.variance > 1e-9) {
    out.z = (out.J - out.mean) / std::sqrt(out.variance);
    out.p_increasing = 1.0 - normal_cdf(out.z);
    out.p_decreasing = normal_cdf(out.z);
    out.p_two_sided = std::min(1.0, 2.0 * std::min(out.p_increasing, out.p_decreasing));
  }
  if (exact && r.total() <= 12) {
    double up = 1.0, lo = 1.0;
    exact_tails(samples, out.J, up, lo);
    out.exact_p_increasing = up;
    out.exact_p_decreasing = lo;
  }
  return out;
}

}  // namespace pdbench
