#pragma once

#include <span>
#include <string>
#include <vector>

namespace alns {

struct WilcoxonResult {
  /// min(W+, W-) over the nonzero differences.
  double statistic = 0.0;
  double p_value = 1.0;
  bool significant = false;
  /// Number of nonzero differences.
  std::size_t n = 0;
  bool exact = true;
};

/// Average ranks (1-based) of |values|; tied magnitudes share their mean rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Two-sided signed-rank test. Zero differences are dropped. Exact null
/// distribution for n <= exact_limit, otherwise the normal approximation with
/// tie-corrected variance and continuity correction. Throws
/// std::invalid_argument when every difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences, double alpha = 0.05,
                                    std::size_t exact_limit = 12);

/// Exact branch only (any n; cost grows with the rank sum).
double wilcoxon_exact_p(std::span<const double> differences);
/// Normal-approximation branch only.
double wilcoxon_normal_p(std::span<const double> differences);

struct Comparison {
  std::string a;
  std::string b;
  /// Mean of a - b.
  double mean_diff = 0.0;
  WilcoxonResult test;
};

/// Paired comparison of equally long samples.
Comparison compare_paired(std::string a, std::string b, std::span<const double> xa, std::span<const double> xb,
                          double alpha = 0.05);

std::string comparison_header();
std::string to_csv(const Comparison& c);

}  // namespace alns
