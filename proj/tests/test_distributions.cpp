#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "lisa/distributions.hpp"
#include "lisa/stats.hpp"

using namespace lisa;

TEST_CASE("law validation and dimensions") {
  CHECK(law_dimension(UniformSymmetric{}) == 1);
  CHECK(law_dimension(IsotropicNormal{0.5, 3}) == 3);
  CHECK_THROWS_AS(validate_law(ScaledNormal{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_law(PowerMixture{0.9, 0.25, 0.3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_law(PowerMixture{2.0, -1.0, 0.3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_law(PowerMixture{2.0, 0.25, 1.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_law(IsotropicNormal{0.5, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_law(DeterministicStep{0.0}),
                  std::invalid_argument);
  CHECK(law_name(PowerMixture{2, 0.25, 0.3}) ==
        std::string("power-mixture"));
}

TEST_CASE("radial moments of the uniform law") {
  // eta ~ U[0,1]: E eta^t = 1/(t+1), eta_hat == eta
  CHECK(eta_moment(UniformSymmetric{}, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(eta_moment(UniformSymmetric{}, 2.5) ==
        doctest::Approx(1.0 / 3.5).epsilon(1e-12));
  CHECK(eta_hat_moment(UniformSymmetric{}, 2.5) ==
        doctest::Approx(1.0 / 3.5).epsilon(1e-12));
}

TEST_CASE("radial moments of the power mixture") {
  const PowerMixture pm{2.0, 0.25, 0.3};
  // (1-p) beta/(beta+t) + p alpha/(alpha-t)
  CHECK(eta_moment(pm, 1.0) == doctest::Approx(0.74).epsilon(1e-12));
  CHECK(eta_moment(pm, 0.5) ==
        doctest::Approx(0.7 * 0.25 / 0.75 + 0.3 * 2.0 / 1.5).epsilon(1e-12));
  CHECK_THROWS_AS(eta_moment(pm, 2.0), std::domain_error);
  CHECK_THROWS_AS(eta_moment(pm, 2.5), std::domain_error);
  // truncation caps the tail branch at p
  CHECK(eta_hat_moment(pm, 1.0) ==
        doctest::Approx(0.7 * 0.25 / 1.25 + 0.3).epsilon(1e-12));
  CHECK(eta_hat_moment(pm, 4.0) ==
        doctest::Approx(0.7 * 0.25 / 4.25 + 0.3).epsilon(1e-12));
}

TEST_CASE("radial moments of the scaled normal against closed forms") {
  for (double a : {0.3, 0.5, 1.1}) {
    CHECK(eta_moment(ScaledNormal{a}, 1.0) ==
          doctest::Approx(a * std::sqrt(2.0 / M_PI)).epsilon(1e-10));
    // E min(|aZ|,1) = a sqrt(2/pi)(1 - exp(-1/(2a^2))) + erfc(1/(a sqrt 2))
    const double want =
        a * std::sqrt(2.0 / M_PI) * (1.0 - std::exp(-1.0 / (2 * a * a))) +
        std::erfc(1.0 / (a * std::sqrt(2.0)));
    CHECK(eta_hat_moment(ScaledNormal{a}, 1.0) ==
          doctest::Approx(want).epsilon(1e-8));
  }
  // E |aZ|^2 = a^2
  CHECK(eta_moment(ScaledNormal{0.7}, 2.0) ==
        doctest::Approx(0.49).epsilon(1e-9));
}

TEST_CASE("radial moment of the isotropic normal is the chi mean") {
  // d = 2: E eta = a sqrt(pi/2)
  CHECK(eta_moment(IsotropicNormal{0.4, 2}, 1.0) ==
        doctest::Approx(0.4 * std::sqrt(M_PI / 2.0)).epsilon(1e-8));
  // d = 3: E eta = 2a sqrt(2/pi)
  CHECK(eta_moment(IsotropicNormal{0.4, 3}, 1.0) ==
        doctest::Approx(0.8 * std::sqrt(2.0 / M_PI)).epsilon(1e-8));
  CHECK(eta_hat_moment(IsotropicNormal{0.4, 2}, 1.0) <
        eta_moment(IsotropicNormal{0.4, 2}, 1.0));
}

TEST_CASE("psi draws respect each law") {
  RandomStream rng(555);
  double buf[3];
  for (int i = 0; i < 200; ++i) {
    sample_psi(UniformSymmetric{}, rng, {buf, 1});
    CHECK(std::abs(buf[0]) <= 1.0);
  }
  bool pos = false, neg = false;
  for (int i = 0; i < 50; ++i) {
    sample_psi(DeterministicStep{0.75}, rng, {buf, 1});
    CHECK(std::abs(buf[0]) == 0.75);
    (buf[0] > 0 ? pos : neg) = true;
  }
  CHECK(pos);
  CHECK(neg);
  sample_psi(IsotropicNormal{0.5, 3}, rng, {buf, 3});
  CHECK_THROWS_AS(sample_psi(IsotropicNormal{0.5, 3}, rng, {buf, 2}),
                  std::invalid_argument);
}

TEST_CASE("eta draws follow the mixture cdf") {
  RandomStream rng(808);
  std::vector<double> draws(10000);
  for (auto& v : draws) v = sample_eta(PowerMixture{2.0, 0.25, 0.3}, rng);
  const auto res = stats::ks_test_one_sample(draws, [](double x) {
    if (x <= 0) return 0.0;
    if (x < 1) return 0.7 * std::pow(x, 0.25);
    return 1.0 - 0.3 * std::pow(x, -2.0);
  });
  CHECK(res.p_value > 1e-3);
}

TEST_CASE("analytic maximal-functional laws") {
  const double alpha = 2.0, beta = 0.25, p = 0.3;
  const HLaw law = h_law_analytic(alpha, beta, p);

  // F continuous at 0 with value 1-p, exponential in both tails
  CHECK(law.F(0.0) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(law.F(-1.0) == doctest::Approx(0.7 * std::exp(-0.25)).epsilon(1e-12));
  CHECK(law.F(1.0) == doctest::Approx(1.0 - 0.3 * std::exp(-2.0)).epsilon(1e-12));

  // branch constant and continuity of H at 1
  const double A = std::pow(1.0 - p, 1.0 + beta / alpha);
  CHECK(law.H(1.0) == doctest::Approx(A).epsilon(1e-12));
  CHECK(law.H(1.0 - 1e-9) == doctest::Approx(A).epsilon(1e-6));
  CHECK(law.H(1.0 + 1e-9) == doctest::Approx(A).epsilon(1e-6));
  CHECK(law.H(0.0) == 0.0);
  CHECK(law.H(1e9) == doctest::Approx(1.0).epsilon(1e-9));

  // G is the log-scale transport of H; the frozen variant loses continuity
  CHECK(law.G(0.0) == doctest::Approx(law.H(1.0)).epsilon(1e-12));
  CHECK(law.G(-2.0) == doctest::Approx(law.H(std::exp(-2.0))).epsilon(1e-12));
  CHECK(law.G(-20.0) < 1e-2);
  CHECK(law.G_printed(-20.0) == doctest::Approx(A * std::exp(beta)).epsilon(1e-12));
  CHECK(law.G_printed(-20.0) != doctest::Approx(law.G(-20.0)).epsilon(1e-3));

  CHECK_THROWS_AS(h_law_analytic(0.5, 0.25, 0.3), std::invalid_argument);
}

TEST_CASE("maximal-functional sampling") {
  RandomStream a(17, 3), b(17, 3);
  const PowerMixture pm{2.0, 0.25, 0.3};
  CHECK(sample_H(pm, a) == sample_H(pm, b));

  // q < 1: the first factor is the maximum, later ones only shrink
  RandomStream r(1);
  CHECK(sample_H(DeterministicStep{0.5}, r) == 0.5);
  CHECK_THROWS_AS(sample_H(DeterministicStep{1.0}, r), std::runtime_error);
  CHECK_THROWS_AS(sample_H(DeterministicStep{1.5}, r), std::runtime_error);

  // empirical cdf of H against the closed form
  const HLaw law = h_law_analytic(2.0, 0.25, 0.3);
  RandomStream rng(9001);
  std::vector<double> draws(20000);
  for (auto& v : draws) v = sample_H(pm, rng);
  const auto res = stats::ks_test_one_sample(draws, law.H);
  CHECK(res.p_value > 1e-3);
}

TEST_CASE("theory constants bundle") {
  const TheoryConstants u = constants(UniformSymmetric{});
  CHECK(u.C == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(u.C_hat == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(u.phi(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  const double t_star = 1.0 + std::sqrt(2.0);
  CHECK(u.phi(t_star) ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  CHECK(std::isinf(u.t_max));

  const TheoryConstants pm = constants(PowerMixture{2.0, 0.25, 0.3});
  CHECK(pm.t_max == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pm.phi(1.0) == doctest::Approx(1.0 - 0.74 - 0.44).epsilon(1e-12));
}
