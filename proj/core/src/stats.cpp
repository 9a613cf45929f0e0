#include "driftmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace driftmc {

double RunningStat::variance() const {
  if (n_ < 2) return 0.0;
  return m2_ / static_cast<double>(n_ - 1);
}

double RunningStat::stddev() const { return std::sqrt(variance()); }

double RunningStat::stderr_mean() const {
  if (n_ < 1) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n_));
}

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  const double gln = std::lgamma(a);
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - gln);
}

// Continued fraction for Q(a, x) (modified Lentz), valid for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
  const double gln = std::lgamma(a);
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad args");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return 1.0 - regularized_gamma_p(df / 2.0, x / 2.0);
}

double chi_square_gof_pvalue(std::span<const std::int64_t> observed,
                             std::span<const double> expected_probs,
                             double min_expected) {
  if (observed.size() != expected_probs.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  std::int64_t total = 0;
  for (auto c : observed) total += c;
  if (total == 0) return 1.0;

  // Pool low-expectation cells left to right.
  std::vector<double> exp_counts;
  std::vector<double> obs_counts;
  double acc_e = 0.0, acc_o = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_e += expected_probs[i] * static_cast<double>(total);
    acc_o += static_cast<double>(observed[i]);
    if (acc_e >= min_expected) {
      exp_counts.push_back(acc_e);
      obs_counts.push_back(acc_o);
      acc_e = acc_o = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (exp_counts.empty()) {
      exp_counts.push_back(acc_e);
      obs_counts.push_back(acc_o);
    } else {
      exp_counts.back() += acc_e;
      obs_counts.back() += acc_o;
    }
  }
  if (exp_counts.size() < 2) return 1.0;

  double stat = 0.0;
  for (std::size_t i = 0; i < exp_counts.size(); ++i) {
    const double d = obs_counts[i] - exp_counts[i];
    stat += d * d / exp_counts[i];
  }
  return chi_square_sf(stat, static_cast<double>(exp_counts.size() - 1));
}

double chi_square_homogeneity_pvalue(std::span<const std::int64_t> counts_a,
                                     std::span<const std::int64_t> counts_b) {
  if (counts_a.size() != counts_b.size() || counts_a.empty())
    throw std::invalid_argument("chi_square_homogeneity: size mismatch");
  const std::size_t k = counts_a.size();
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    na += static_cast<double>(counts_a[i]);
    nb += static_cast<double>(counts_b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  double stat = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double col = static_cast<double>(counts_a[i] + counts_b[i]);
    if (col == 0.0) continue;
    ++used;
    const double ea = col * na / (na + nb);
    const double eb = col * nb / (na + nb);
    const double da = static_cast<double>(counts_a[i]) - ea;
    const double db = static_cast<double>(counts_b[i]) - eb;
    stat += da * da / ea + db * db / eb;
  }
  if (used < 2) return 1.0;
  return chi_square_sf(stat, static_cast<double>(used - 1));
}

namespace {

double kolmogorov_sf(double t) {
  // Q_KS(t) = 2 sum (-1)^{j-1} exp(-2 j^2 t^2)
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

double ks_distance_sorted(std::span<const double> sorted_data,
                          double (*cdf)(double)) {
  const double n = static_cast<double>(sorted_data.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_data.size(); ++i) {
    const double f = cdf(sorted_data[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, std::fabs(f - lo), std::fabs(f - hi)});
  }
  return d;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  const double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw std::invalid_argument("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

double chi_square_independence_pvalue(
    const std::vector<std::vector<std::int64_t>>& table) {
  if (table.empty() || table[0].empty())
    throw std::invalid_argument("chi_square_independence: empty table");
  const std::size_t rows = table.size();
  const std::size_t cols = table[0].size();
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (table[i].size() != cols)
      throw std::invalid_argument("chi_square_independence: ragged table");
    for (std::size_t j = 0; j < cols; ++j) {
      row_sum[i] += static_cast<double>(table[i][j]);
      col_sum[j] += static_cast<double>(table[i][j]);
      total += static_cast<double>(table[i][j]);
    }
  }
  if (total == 0.0) return 1.0;
  double stat = 0.0;
  std::size_t r_used = 0, c_used = 0;
  for (std::size_t i = 0; i < rows; ++i)
    if (row_sum[i] > 0.0) ++r_used;
  for (std::size_t j = 0; j < cols; ++j)
    if (col_sum[j] > 0.0) ++c_used;
  if (r_used < 2 || c_used < 2) return 1.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = row_sum[i] * col_sum[j] / total;
      if (e <= 0.0) continue;
      const double d = static_cast<double>(table[i][j]) - e;
      stat += d * d / e;
    }
  return chi_square_sf(stat,
                       static_cast<double>((r_used - 1) * (c_used - 1)));
}

double fit_survival_exponent(std::span<const double> samples, double h_lo,
                             double h_hi, int n_grid) {
  if (samples.empty() || h_lo <= 0.0 || h_hi <= h_lo || n_grid < 2)
    throw std::invalid_argument("fit_survival_exponent: bad arguments");
  std::vector<double> log_h, log_s;
  const double step = std::log(h_hi / h_lo) / static_cast<double>(n_grid - 1);
  for (int i = 0; i < n_grid; ++i) {
    const double h = h_lo * std::exp(step * i);
    std::int64_t exceed = 0;
    for (double x : samples)
      if (x > h) ++exceed;
    if (exceed == 0) continue;
    log_h.push_back(std::log(h));
    log_s.push_back(std::log(static_cast<double>(exceed) /
                             static_cast<double>(samples.size())));
  }
  if (log_h.size() < 2)
    throw std::runtime_error("fit_survival_exponent: tail has no support");
  return -fit_line(log_h, log_s).slope;
}

}  // namespace driftmc
