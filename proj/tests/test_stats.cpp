#include <cmath>
#include <vector>

#include <doctest.h>

#include "lisa/rng.hpp"
#include "lisa/stats.hpp"

using namespace lisa;

TEST_CASE("normal cdf") {
  CHECK(stats::normal_cdf(0.0) == 0.5);
  CHECK(stats::normal_cdf(1.0) ==
        doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(stats::normal_cdf(-1.0) ==
        doctest::Approx(1.0 - 0.8413447460685429).epsilon(1e-12));
  CHECK(stats::normal_cdf(1.959963984540054) ==
        doctest::Approx(0.975).epsilon(1e-10));
  CHECK(stats::normal_cdf(-40.0) == doctest::Approx(0.0));
  CHECK(stats::normal_cdf(40.0) == doctest::Approx(1.0));
}

TEST_CASE("incomplete gamma") {
  // a = 1 reduces to the exponential cdf
  CHECK(stats::gamma_p(1.0, 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(stats::gamma_q(1.0, 2.5) ==
        doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
  // a = 1/2 reduces to erf
  CHECK(stats::gamma_p(0.5, 1.0) ==
        doctest::Approx(std::erf(1.0)).epsilon(1e-12));
  for (double a : {0.3, 1.0, 4.5}) {
    for (double x : {0.1, 1.0, 10.0}) {
      CHECK(stats::gamma_p(a, x) + stats::gamma_q(a, x) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("regularized beta") {
  CHECK(stats::beta_cdf(0.3, 1.0, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(stats::beta_cdf(0.3, 2.0, 1.0) ==
        doctest::Approx(0.09).epsilon(1e-12));
  // Beta(1/2, 3/2): cdf = (2/pi)(asin sqrt x + sqrt(x(1-x)))
  const double x = 0.5;
  const double want =
      (2.0 / M_PI) * (std::asin(std::sqrt(x)) + std::sqrt(x * (1 - x)));
  CHECK(stats::beta_cdf(x, 0.5, 1.5) == doctest::Approx(want).epsilon(1e-10));
  CHECK(stats::beta_cdf(0.0, 0.5, 1.5) == 0.0);
  CHECK(stats::beta_cdf(1.0, 0.5, 1.5) == 1.0);
}

TEST_CASE("chi-square survival") {
  CHECK(stats::chi2_sf(3.0, 2.0) ==
        doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
  // one degree of freedom folds the normal
  CHECK(stats::chi2_sf(1.0, 1.0) ==
        doctest::Approx(2.0 * (1.0 - stats::normal_cdf(1.0))).epsilon(1e-10));
}

TEST_CASE("kolmogorov tail") {
  // 2 sum (-1)^{k-1} exp(-2 k^2 t^2)
  double want = 0.0;
  for (int k = 1; k <= 12; ++k)
    want += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k);
  CHECK(stats::kolmogorov_q(1.0) == doctest::Approx(want).epsilon(1e-8));
  CHECK(stats::kolmogorov_q(0.01) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(stats::kolmogorov_q(4.0) < 1e-10);
}

TEST_CASE("one-sample KS statistic is exact on a hand example") {
  const auto res = stats::ks_test_one_sample(
      {0.1, 0.2, 0.3, 0.4, 0.5}, [](double t) { return t; });
  CHECK(res.statistic == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(res.p_value > 0.0);
  CHECK(res.p_value < 0.25);
}

TEST_CASE("KS p-values are calibrated under the null") {
  RandomStream rng(99);
  int below10 = 0;
  const int sets = 200;
  for (int s = 0; s < sets; ++s) {
    std::vector<double> data(100);
    for (auto& v : data) v = rng.uniform01();
    const auto res =
        stats::ks_test_one_sample(data, [](double t) { return t; });
    if (res.p_value < 0.1) ++below10;
  }
  // binomial(200, 0.1): mean 20, sd 4.2
  CHECK(below10 >= 4);
  CHECK(below10 <= 40);
}

TEST_CASE("two-sample KS") {
  const auto res =
      stats::ks_test_two_sample({0.0, 0.5}, {0.25, 0.75});
  CHECK(res.statistic == doctest::Approx(0.5).epsilon(1e-12));
  RandomStream rng(7);
  std::vector<double> a(3000), b(3000);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal();
  CHECK(stats::ks_test_two_sample(a, b).p_value > 1e-3);
  for (auto& v : b) v += 0.5;
  CHECK(stats::ks_test_two_sample(a, b).p_value < 1e-6);
}

TEST_CASE("chi-square uniform counts") {
  const auto flat = stats::chi2_uniform_counts(
      std::vector<double>{10, 10, 10, 10});
  CHECK(flat.statistic == 0.0);
  CHECK(flat.p_value == doctest::Approx(1.0));
  const auto skew =
      stats::chi2_uniform_counts(std::vector<double>{20, 0});
  CHECK(skew.statistic == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(skew.p_value < 1e-4);
}

TEST_CASE("moments and least squares") {
  const std::vector<double> xs = {1, 2, 3, 4};
  CHECK(stats::mean(xs) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(stats::sample_variance(xs) ==
        doctest::Approx(5.0 / 3.0).epsilon(1e-14));
  CHECK(stats::standard_error(xs) ==
        doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-14));
  const std::vector<double> fx = {0, 1, 2}, fy = {1, 3, 5};
  const auto fit = stats::linear_fit(fx, fy);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-13));
}
