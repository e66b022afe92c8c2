#include "alns/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace alns {
namespace {

struct Signed {
  std::vector<double> ranks;
  std::vector<bool> positive;
  double w_plus = 0.0;
  double w_minus = 0.0;
};

Signed rank_nonzero(std::span<const double> differences) {
  std::vector<double> nz;
  for (double d : differences) {
    if (!std::isfinite(d)) throw std::invalid_argument("differences must be finite");
    if (d != 0.0) nz.push_back(d);
  }
  if (nz.empty()) throw std::invalid_argument("all paired differences are zero");
  Signed s;
  s.ranks = average_ranks(nz);
  for (std::size_t i = 0; i < nz.size(); ++i) {
    s.positive.push_back(nz[i] > 0);
    (nz[i] > 0 ? s.w_plus : s.w_minus) += s.ranks[i];
  }
  return s;
}

// Count of sign assignments per doubled rank sum (average ranks are multiples of 1/2).
double exact_p(const Signed& s) {
  std::vector<long> doubled;
  for (double r : s.ranks) doubled.push_back(std::lround(2.0 * r));
  const long total = std::accumulate(doubled.begin(), doubled.end(), 0L);
  std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
  count[0] = 1.0;
  for (long r : doubled) {
    for (long v = total; v >= r; --v) count[static_cast<std::size_t>(v)] += count[static_cast<std::size_t>(v - r)];
  }
  const long observed = std::lround(2.0 * s.w_plus);
  double le = 0.0, ge = 0.0, all = 0.0;
  for (long v = 0; v <= total; ++v) {
    const double c = count[static_cast<std::size_t>(v)];
    all += c;
    if (v <= observed) le += c;
    if (v >= observed) ge += c;
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / all);
}

double normal_p(const Signed& s) {
  const double n = static_cast<double>(s.ranks.size());
  const double mean = n * (n + 1.0) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  std::vector<double> sorted = s.ranks;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    var -= (t * t * t - t) / 48.0;
    i = j;
  }
  if (var <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(s.w_plus - mean) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(values[a]) < std::abs(values[b]); });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && std::abs(values[order[j]]) == std::abs(values[order[i]])) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences, double alpha, std::size_t exact_limit) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const Signed s = rank_nonzero(differences);
  WilcoxonResult r;
  r.n = s.ranks.size();
  r.statistic = std::min(s.w_plus, s.w_minus);
  r.exact = r.n <= exact_limit;
  r.p_value = r.exact ? exact_p(s) : normal_p(s);
  r.significant = r.p_value < alpha;
  return r;
}

double wilcoxon_exact_p(std::span<const double> differences) { return exact_p(rank_nonzero(differences)); }
double wilcoxon_normal_p(std::span<const double> differences) { return normal_p(rank_nonzero(differences)); }

Comparison compare_paired(std::string a, std::string b, std::span<const double> xa, std::span<const double> xb,
                          double alpha) {
  if (xa.size() != xb.size()) throw std::invalid_argument("paired samples differ in length");
  if (xa.empty()) throw std::invalid_argument("paired samples are empty");
  std::vector<double> diff(xa.size());
  for (std::size_t i = 0; i < xa.size(); ++i) diff[i] = xa[i] - xb[i];
  Comparison c{std::move(a), std::move(b), std::accumulate(diff.begin(), diff.end(), 0.0) / diff.size(), {}};
  c.test = wilcoxon_signed_rank(diff, alpha);
  return c;
}

std::string comparison_header() { return "A,B,mean_diff,statistic,p,significant"; }

std::string to_csv(const Comparison& c) {
  std::ostringstream out;
  out.precision(10);
  out << c.a << ',' << c.b << ',' << c.mean_diff << ',' << c.test.statistic << ',' << c.test.p_value << ','
      << (c.test.significant ? "true" : "false");
  return out.str();
}

}  // namespace alns
