#include "lisa/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lisa/quadrature.hpp"
#include "lisa/stats.hpp"

namespace lisa {

namespace {

double half_normal_density(double x) {
  return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * x * x);
}

double chi_density(double x, int d) {
  // |Z_d| for a standard d-dimensional normal.
  double logf = (1.0 - 0.5 * d) * std::numbers::ln2 + (d - 1) * std::log(x) -
                0.5 * x * x - std::lgamma(0.5 * d);
  return std::exp(logf);
}

double power_mixture_eta_quantile(const PowerMixture& m, double u) {
  if (u < 1.0 - m.p) return std::pow(u / (1.0 - m.p), 1.0 / m.beta);
  return std::pow((1.0 - u) / m.p, -1.0 / m.alpha);
}

}  // namespace

int law_dimension(const DisplacementLaw& law) {
  if (const auto* iso = std::get_if<IsotropicNormal>(&law))
    return iso->dimension;
  return 1;
}

void validate_law(const DisplacementLaw& law) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ScaledNormal>) {
          if (!(v.a > 0)) throw std::invalid_argument("scaled-normal: a <= 0");
        } else if constexpr (std::is_same_v<T, PowerMixture>) {
          if (!(v.alpha > 1) || !(v.beta > 0) || !(v.p > 0 && v.p < 1))
            throw std::invalid_argument("power-mixture: need alpha > 1, beta > 0, p in (0,1)");
        } else if constexpr (std::is_same_v<T, IsotropicNormal>) {
          if (!(v.a > 0) || v.dimension < 1)
            throw std::invalid_argument("isotropic-normal: need a > 0, d >= 1");
        } else if constexpr (std::is_same_v<T, DeterministicStep>) {
          if (!(v.q > 0)) throw std::invalid_argument("deterministic: q <= 0");
        }
      },
      law);
}

const char* law_name(const DisplacementLaw& law) {
  struct Visitor {
    const char* operator()(const UniformSymmetric&) { return "uniform-symmetric"; }
    const char* operator()(const ScaledNormal&) { return "scaled-normal"; }
    const char* operator()(const PowerMixture&) { return "power-mixture"; }
    const char* operator()(const IsotropicNormal&) { return "isotropic-normal"; }
    const char* operator()(const DeterministicStep&) { return "deterministic"; }
  };
  return std::visit(Visitor{}, law);
}

void sample_psi(const DisplacementLaw& law, RandomStream& rng,
                std::span<double> out) {
  if (out.size() != static_cast<std::size_t>(law_dimension(law)))
    throw std::invalid_argument("sample_psi: output dimension mismatch");
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformSymmetric>) {
          out[0] = rng.uniform(-1.0, 1.0);
        } else if constexpr (std::is_same_v<T, ScaledNormal>) {
          out[0] = v.a * rng.normal();
        } else if constexpr (std::is_same_v<T, PowerMixture>) {
          double eta = power_mixture_eta_quantile(v, rng.uniform01());
          out[0] = rng.uniform01() < 0.5 ? eta : -eta;
        } else if constexpr (std::is_same_v<T, IsotropicNormal>) {
          for (double& c : out) c = v.a * rng.normal();
        } else {
          out[0] = rng.uniform01() < 0.5 ? v.q : -v.q;
        }
      },
      law);
}

double sample_eta(const DisplacementLaw& law, RandomStream& rng) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformSymmetric>) {
          return rng.uniform01();
        } else if constexpr (std::is_same_v<T, ScaledNormal>) {
          return v.a * std::fabs(rng.normal());
        } else if constexpr (std::is_same_v<T, PowerMixture>) {
          return power_mixture_eta_quantile(v, rng.uniform01());
        } else if constexpr (std::is_same_v<T, IsotropicNormal>) {
          double s = 0.0;
          for (int i = 0; i < v.dimension; ++i) {
            double z = rng.normal();
            s += z * z;
          }
          return v.a * std::sqrt(s);
        } else {
          return v.q;
        }
      },
      law);
}

double eta_moment(const DisplacementLaw& law, double t) {
  validate_law(law);
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformSymmetric>) {
          return 1.0 / (t + 1.0);
        } else if constexpr (std::is_same_v<T, ScaledNormal>) {
          double a = v.a;
          return quad::integrate_to_inf(
              [a, t](double x) {
                return std::pow(a * x, t) * half_normal_density(x);
              },
              0.0);
        } else if constexpr (std::is_same_v<T, PowerMixture>) {
          if (t >= v.alpha)
            throw std::domain_error("eta_moment: diverges for t >= alpha");
          return (1.0 - v.p) * v.beta / (v.beta + t) +
                 v.p * v.alpha / (v.alpha - t);
        } else if constexpr (std::is_same_v<T, IsotropicNormal>) {
          double a = v.a;
          int d = v.dimension;
          return quad::integrate_to_inf(
              [a, t, d](double x) {
                return std::pow(a * x, t) * chi_density(x, d);
              },
              0.0);
        } else {
          return std::pow(v.q, t);
        }
      },
      law);
}

double eta_hat_moment(const DisplacementLaw& law, double t) {
  validate_law(law);
  if (!(t > 0)) throw std::invalid_argument("eta_hat_moment: t must be > 0");
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniformSymmetric>) {
          return 1.0 / (t + 1.0);
        } else if constexpr (std::is_same_v<T, ScaledNormal>) {
          double a = v.a;
          double body = quad::integrate(
              [a, t](double x) {
                return std::pow(a * x, t) * half_normal_density(x);
              },
              0.0, 1.0 / a);
          double tail = 2.0 * (1.0 - stats::normal_cdf(1.0 / a));
          return body + tail;
        } else if constexpr (std::is_same_v<T, PowerMixture>) {
          return (1.0 - v.p) * v.beta / (v.beta + t) + v.p;
        } else if constexpr (std::is_same_v<T, IsotropicNormal>) {
          double a = v.a;
          int d = v.dimension;
          double body = quad::integrate(
              [a, t, d](double x) {
                return std::pow(a * x, t) * chi_density(x, d);
              },
              0.0, 1.0 / a);
          double tail = quad::integrate_to_inf(
              [d](double x) { return chi_density(x, d); }, 1.0 / a);
          return body + tail;
        } else {
          return std::pow(std::min(v.q, 1.0), t);
        }
      },
      law);
}

TheoryConstants constants(const DisplacementLaw& law) {
  validate_law(law);
  TheoryConstants tc;
  tc.C = eta_moment(law, 1.0);
  tc.C_hat = eta_hat_moment(law, 1.0);
  tc.t_max = std::numeric_limits<double>::infinity();
  if (const auto* m = std::get_if<PowerMixture>(&law)) tc.t_max = m->alpha;
  tc.phi = [law](double t) {
    return 1.0 - (eta_moment(law, t) + eta_hat_moment(law, t));
  };
  return tc;
}

HLaw h_law_analytic(double alpha, double beta, double p) {
  if (!(alpha > 1) || !(beta > 0) || !(p > 0 && p < 1))
    throw std::invalid_argument("h_law_analytic: need alpha > 1, beta > 0, p in (0,1)");
  double A = std::pow(1.0 - p, 1.0 + beta / alpha);
  double ratio = p / (1.0 - p);
  double expo = -1.0 - beta / alpha;
  HLaw law;
  law.F = [p, alpha, beta](double t) {
    if (t <= 0) return (1.0 - p) * std::exp(beta * t);
    return 1.0 - p * std::exp(-alpha * t);
  };
  law.G = [A, ratio, expo, alpha, beta](double t) {
    if (t < 0) return A * std::exp(beta * t);
    return std::pow(ratio * std::exp(-alpha * t) + 1.0, expo);
  };
  law.G_printed = [A, ratio, expo, alpha, beta](double t) {
    if (t < 0) return A * std::exp(beta);
    return std::pow(ratio * std::exp(-alpha * t) + 1.0, expo);
  };
  law.H = [A, ratio, expo, alpha, beta](double x) {
    if (x <= 0) return 0.0;
    if (x < 1) return A * std::pow(x, beta);
    return std::pow(ratio * std::pow(x, -alpha) + 1.0, expo);
  };
  return law;
}

double sample_H(const DisplacementLaw& law, RandomStream& rng,
                double tail_eps) {
  validate_law(law);
  if (!(tail_eps > 0)) throw std::invalid_argument("sample_H: tail_eps <= 0");
  if (const auto* det = std::get_if<DeterministicStep>(&law)) {
    if (det->q >= 1)
      throw std::runtime_error("sample_H: eta_hat is identically 1, the product never shrinks");
  }
  double running = 1.0;
  double best = 0.0;
  while (running >= tail_eps) {
    double eta = sample_eta(law, rng);
    double cand = running * eta;
    if (cand > best) best = cand;
    running *= std::min(eta, 1.0);
  }
  return best;
}

}  // namespace lisa
