#include "gbs/bell.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gbs/field.hpp"

namespace gbs {

FieldOperator dichotomic_operator(const DichotomicParams& d, std::size_t n_max) {
  if (!(d.p >= 0.0 && d.p <= 1.0)) throw std::invalid_argument("dichotomic_operator: p must lie in [0, 1]");
  if (n_max < 1) throw std::invalid_argument("dichotomic_operator: n_max must be >= 1");
  FieldOperator f(n_max + 1);
  const double z = 2.0 * d.p - 1.0;
  const double off = 2.0 * std::sqrt(d.p * (1.0 - d.p));
  f(0, 0) = -z;
  f(1, 1) = z;
  f(1, 0) = std::polar(off, d.phi);
  f(0, 1) = std::polar(off, -d.phi);
  return f;
}

GbsBasisMatrix dichotomic_gbs_matrix(double p, double phi_basis, double phi_op) {
  const double delta = phi_op - phi_basis;
  const double s2 = std::pow(std::sin(0.5 * delta), 2);
  const double pq = p * (1.0 - p);
  return {1.0 - 8.0 * pq * s2, 2.0 * std::sqrt(pq) * cplx{2.0 * (1.0 - 2.0 * p) * s2, std::sin(delta)}};
}

GbsBasisMatrix dichotomic_gbs_matrix_operator(double p, double phi_basis, double phi_op, std::size_t n_max) {
  const GbsParams g{p, phi_basis};
  const StateVector b1 = gbs_state(g, n_max);
  const StateVector b2 = gbs_state(orthogonal_partner(g), n_max);
  const FieldOperator f = dichotomic_operator({p, phi_op}, n_max);
  const std::vector<cplx> fb2 = f.apply(b2.amplitudes());
  cplx f12{};
  for (std::size_t n = 0; n < b1.dim(); ++n) f12 += std::conj(b1[n]) * fb2[n];
  return {expectation(f, b1).real(), f12};
}

std::pair<StateVector, StateVector> dichotomic_eigenstates(double p, double phi_basis, double phi_op,
                                                           std::size_t n_max) {
  const GbsParams g{p, phi_basis};
  const StateVector b1 = gbs_state(g, n_max);
  const StateVector b2 = gbs_state(orthogonal_partner(g), n_max);
  const auto [f11, f12] = dichotomic_gbs_matrix(p, phi_basis, phi_op);
  const double mod = std::abs(f12);

  // Diagonal in the given basis: the closed form is 0/0, take the basis itself.
  if (mod < 1e-300) {
    if (f11 >= 0.0) return {b1, b2};
    return {b2, b1};
  }

  const cplx phase = mod / f12;             // |F12| / F12
  const cplx phase_conj = mod / std::conj(f12);  // |F12| / F12*
  const double nf = std::sqrt(mod * mod + (1.0 - f11) * (1.0 - f11));
  std::vector<cplx> plus(n_max + 1), minus(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    plus[n] = (mod * b1[n] + (1.0 - f11) * phase * b2[n]) / nf;
    minus[n] = ((f11 - 1.0) * phase_conj * b1[n] + mod * b2[n]) / nf;
  }
  return {StateVector(std::move(plus)), StateVector(std::move(minus))};
}

double degree_of_entanglement(double eta) { return 2.0 * std::abs(eta) / (1.0 + eta * eta); }

double eta_for_degree(double G) {
  if (!(G >= 0.0 && G <= 1.0)) throw std::invalid_argument("eta_for_degree: G must lie in [0, 1]");
  if (G == 0.0) return 0.0;
  return (1.0 - std::sqrt(1.0 - G * G)) / G;
}

double bell_correlation(const BellConfig& config, double phi_a, double phi_b) {
  const double p = config.p;
  const double pq = p * (1.0 - p);
  const double a = phi_a - config.theta;
  const double b = phi_b - config.theta;
  const double sa = std::pow(std::sin(0.5 * a), 2);
  const double sb = std::pow(std::sin(0.5 * b), 2);
  const double w = config.eta / (1.0 + config.eta * config.eta);
  const double z = 1.0 - 2.0 * p;
  return -1.0 + 8.0 * pq *
                    (sa + sb - 8.0 * pq * sa * sb +
                     w * (4.0 * z * z * sa * sb + std::sin(a) * std::sin(b)));
}

double bell_correlation_operator(const BellConfig& config, double phi_a, double phi_b, std::size_t n_max) {
  const TwoCavityState psi =
      entangled_gbs_state({config.p, config.p, config.theta, config.theta, config.eta}, n_max);
  return expectation(dichotomic_operator({config.p, phi_a}, n_max), dichotomic_operator({config.p, phi_b}, n_max),
                     psi)
      .real();
}

std::array<std::pair<double, double>, 4> chsh_settings(const BellAngles& a) {
  return {{{a.phi1, a.phi2}, {a.phi1, a.phi2_prime}, {a.phi1_prime, a.phi2}, {a.phi1_prime, a.phi2_prime}}};
}

double chsh_combination(const std::array<double, 4>& c) {
  return std::abs(c[0] - c[1]) + std::abs(c[2] + c[3]);
}

double bell_function(const BellConfig& config) {
  std::array<double, 4> c{};
  const auto settings = chsh_settings(config.angles);
  for (std::size_t k = 0; k < 4; ++k) c[k] = bell_correlation(config, settings[k].first, settings[k].second);
  return chsh_combination(c);
}

double bell_function_operator(const BellConfig& config, std::size_t n_max) {
  const TwoCavityState psi =
      entangled_gbs_state({config.p, config.p, config.theta, config.theta, config.eta}, n_max);
  std::array<double, 4> c{};
  const auto settings = chsh_settings(config.angles);
  for (std::size_t k = 0; k < 4; ++k) {
    c[k] = expectation(dichotomic_operator({config.p, settings[k].first}, n_max),
                       dichotomic_operator({config.p, settings[k].second}, n_max), psi)
               .real();
  }
  return chsh_combination(c);
}

double bell_function_half(const BellConfig& config) {
  const double G = degree_of_entanglement(config.eta);
  const double sign = config.eta < 0.0 ? 1.0 : -1.0;
  const BellAngles& a = config.angles;
  const double t = config.theta;
  const double s1 = std::sin(a.phi1 - t), c1 = std::cos(a.phi1 - t);
  const double s1p = std::sin(a.phi1_prime - t), c1p = std::cos(a.phi1_prime - t);
  const double s2 = std::sin(a.phi2 - t), c2 = std::cos(a.phi2 - t);
  const double s2p = std::sin(a.phi2_prime - t), c2p = std::cos(a.phi2_prime - t);
  return std::abs(G * s1 * (s2 - s2p) + sign * c1 * (c2 - c2p)) +
         std::abs(G * s1p * (s2 + s2p) + sign * c1p * (c2 + c2p));
}

BellAngles angle_preset(AnglePreset kind, double theta, bool eta_negative) {
  switch (kind) {
    case AnglePreset::maximal:
      return {theta, theta + kPi / 4.0, theta + kPi / 2.0, theta + 3.0 * kPi / 4.0};
    case AnglePreset::wide:
      return {theta, theta, theta + kPi / 3.0, eta_negative ? theta + 2.0 * kPi / 3.0 : theta - 2.0 * kPi / 3.0};
  }
  throw std::invalid_argument("angle_preset: unknown preset");
}

double analytic_s_b(AnglePreset kind, double G) {
  if (!(G >= 0.0 && G <= 1.0)) throw std::invalid_argument("analytic_s_b: G must lie in [0, 1]");
  switch (kind) {
    case AnglePreset::maximal:
      return std::sqrt(2.0) * (1.0 + G);
    case AnglePreset::wide:
      return 1.75 + 0.75 * G;
  }
  throw std::invalid_argument("analytic_s_b: unknown preset");
}

double violation_threshold(AnglePreset kind) {
  switch (kind) {
    case AnglePreset::maximal:
      return std::sqrt(2.0) - 1.0;
    case AnglePreset::wide:
      return 1.0 / 3.0;
  }
  throw std::invalid_argument("violation_threshold: unknown preset");
}

BellConfig preset_config(AnglePreset kind, double eta, double theta) {
  return {0.5, theta, eta, angle_preset(kind, theta, eta < 0.0)};
}

PScanResult optimal_p_scan(const BellConfig& config_without_p, double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("optimal_p_scan: step must lie in (0, 1]");
  const double count = std::round(1.0 / step);
  if (std::abs(count * step - 1.0) > 1e-9) throw std::invalid_argument("optimal_p_scan: step must divide [0, 1]");
  const auto n = static_cast<long>(count);

  PScanResult result{0.0, -1.0, {}};
  result.curve.reserve(static_cast<std::size_t>(n) + 1);
  BellConfig cfg = config_without_p;
  for (long k = 0; k <= n; ++k) {
    cfg.p = static_cast<double>(k) / static_cast<double>(n);
    const double s = bell_function(cfg);
    result.curve.emplace_back(cfg.p, s);
    const bool better = s > result.s_b_max + 1e-12;
    const bool tie_closer = std::abs(s - result.s_b_max) <= 1e-12 &&
                            std::abs(cfg.p - 0.5) < std::abs(result.p_star - 0.5);
    if (better || tie_closer) {
      result.p_star = cfg.p;
      result.s_b_max = std::max(s, result.s_b_max);
    }
  }
  return result;
}

}  // namespace gbs
