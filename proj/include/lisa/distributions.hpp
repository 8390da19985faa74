#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>

#include "lisa/rng.hpp"

namespace lisa {

// Displacement laws for the jump psi; eta = |psi| is the radial part and
// eta_hat = min(eta, 1) its truncation.
struct UniformSymmetric {};

struct ScaledNormal {
  double a;
};

// P(eta <= x) = (1-p) x^beta on [0,1), 1 - p x^-alpha beyond; sign is +-1
// with equal probability. Both branches invert in closed form.
struct PowerMixture {
  double alpha;
  double beta;
  double p;
};

struct IsotropicNormal {
  double a;
  int dimension;
};

struct DeterministicStep {
  double q;
};

using DisplacementLaw = std::variant<UniformSymmetric, ScaledNormal,
                                     PowerMixture, IsotropicNormal,
                                     DeterministicStep>;

int law_dimension(const DisplacementLaw& law);
void validate_law(const DisplacementLaw& law);
const char* law_name(const DisplacementLaw& law);

// One draw of psi into out (size law_dimension); 1D laws write a signed
// scalar.
void sample_psi(const DisplacementLaw& law, RandomStream& rng,
                std::span<double> out);
// One draw of eta directly; does not share the draw layout of sample_psi.
double sample_eta(const DisplacementLaw& law, RandomStream& rng);

// E eta^t. Throws std::domain_error when the moment diverges
// (power-mixture with t >= alpha).
double eta_moment(const DisplacementLaw& law, double t);
// E min(eta,1)^t; finite for every law and t > 0.
double eta_hat_moment(const DisplacementLaw& law, double t);

struct TheoryConstants {
  double C;
  double C_hat;
  std::function<double(double)> phi;  // 1 - (E eta^t + E eta_hat^t)
  double t_max;                       // sup of the finite-moment domain
  std::optional<double> sigma;        // filled by sigma_exponent on demand
};
TheoryConstants constants(const DisplacementLaw& law);

// Closed-form laws of the maximal functional H for the power-mixture family.
// F is the cdf of log eta; G the cdf of log H. G uses exponent beta*t on the
// negative branch, which makes it continuous; G_printed freezes that exponent
// at beta*1 and is kept only so the harness can show it fails the fixed-point
// equation.
struct HLaw {
  std::function<double(double)> F;
  std::function<double(double)> G;
  std::function<double(double)> G_printed;
  std::function<double(double)> H;
};
HLaw h_law_analytic(double alpha, double beta, double p);

// One realization of H = max_k eta_k * prod_{i<k} eta_hat_i, truncated once
// the running product drops below tail_eps.
double sample_H(const DisplacementLaw& law, RandomStream& rng,
                double tail_eps = 1e-12);

}  // namespace lisa
