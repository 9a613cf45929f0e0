#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace driftmc {

// Streaming mean / variance (Welford). stderr_mean() is the standard error
// of the sample mean.
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased; 0 for n < 2
  double stddev() const;
  double stderr_mean() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Estimate {
  double value = 0.0;
  double stderr = 0.0;
};

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

// Survival function of the chi-square distribution with df degrees of
// freedom: P[X > x].
double chi_square_sf(double x, double df);

// Pearson goodness-of-fit statistic of observed counts against expected
// probabilities; returns the p-value (chi-square with k-1 df). Cells with
// expected count below min_expected are pooled into their neighbor.
double chi_square_gof_pvalue(std::span<const std::int64_t> observed,
                             std::span<const double> expected_probs,
                             double min_expected = 5.0);

// Two-sample chi-square homogeneity test over categorical counts.
double chi_square_homogeneity_pvalue(std::span<const std::int64_t> counts_a,
                                     std::span<const std::int64_t> counts_b);

// Two-sample Kolmogorov-Smirnov: statistic and asymptotic p-value
// (Kolmogorov distribution). Conservative in the presence of ties.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS distance of data against a CDF given as a callable on
// sorted data points. Returns sup |F_n - F|.
double ks_distance_sorted(std::span<const double> sorted_data,
                          double (*cdf)(double));

// Ordinary least squares slope/intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Total variation distance of two discrete distributions on the same
// support ordering.
double total_variation(std::span<const double> p, std::span<const double> q);

// Chi-square independence test on a contingency table (rows x cols).
double chi_square_independence_pvalue(
    const std::vector<std::vector<std::int64_t>>& table);

// Fits P[X > h] ~ c * h^-k by log-log least squares on a geometric grid of
// thresholds spanning [h_lo, h_hi]; returns the exponent k (positive for a
// decaying tail). Grid points with no exceedances are dropped.
double fit_survival_exponent(std::span<const double> samples, double h_lo,
                             double h_hi, int n_grid = 12);

}  // namespace driftmc
