#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lisa::stats {

double normal_cdf(double x);

// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a,b); the Beta(a,b) distribution function.
double beta_cdf(double x, double a, double b);

// Survival function of the chi-square distribution with k degrees of freedom.
double chi2_sf(double x, double k);

// Kolmogorov distribution tail Q(t) = P(sup|B| > t).
double kolmogorov_q(double t);

struct KsResult {
  double statistic;
  double p_value;
};

// One-sample KS against a continuous cdf; data is copied and sorted.
KsResult ks_test_one_sample(std::vector<double> data,
                            const std::function<double(double)>& cdf);
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

// Pearson chi-square goodness of fit for equal expected counts.
struct Chi2Result {
  double statistic;
  double p_value;
};
Chi2Result chi2_uniform_counts(std::span<const double> counts);

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);
double standard_error(std::span<const double> xs);

struct LinearFit {
  double intercept;
  double slope;
};
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace lisa::stats
