#include "gbs/binomial.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbs {

double wrap_phase(double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("wrap_phase: non-finite angle");
  double r = std::remainder(phi, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double phase_distance(double a, double b) { return wrap_phase(a - b); }

BinomialParams::BinomialParams(int n, double prob, double phase) : N(n), p(prob), phi(wrap_phase(phase)) {
  if (N < 0 || N > kMaxBinomialN) {
    throw std::invalid_argument("BinomialParams: N must lie in [0, " + std::to_string(kMaxBinomialN) + "]");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("BinomialParams: p must lie in [0, 1]");
}

GbsParams::GbsParams(double prob, double phase) : p(prob), phi(wrap_phase(phase)) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("GbsParams: p must lie in [0, 1]");
}

double binomial_coefficient(int N, int n) {
  if (n < 0 || n > N) return 0.0;
  if (n > N - n) n = N - n;
  double c = 1.0;
  for (int k = 1; k <= n; ++k) c = c * static_cast<double>(N - n + k) / static_cast<double>(k);
  return c;
}

StateVector binomial_state(const BinomialParams& params, std::size_t n_max) {
  if (n_max < static_cast<std::size_t>(params.N) || n_max < 1) {
    throw std::invalid_argument("binomial_state: n_max must be >= N and >= 1");
  }
  const double q = 1.0 - params.p;
  std::vector<cplx> amps(n_max + 1);
  for (int n = 0; n <= params.N; ++n) {
    // std::pow(0, 0) == 1 gives the exact Fock limits at p = 0 and p = 1
    const double mag = std::sqrt(binomial_coefficient(params.N, n) * std::pow(params.p, n) *
                                 std::pow(q, params.N - n));
    amps[n] = std::polar(mag, n * params.phi);
  }
  return StateVector(std::move(amps));
}

StateVector gbs_state(const GbsParams& g, std::size_t n_max) { return binomial_state(g.as_binomial(), n_max); }

cplx binomial_overlap(const BinomialParams& a, const BinomialParams& b) {
  if (a.N != b.N) throw std::invalid_argument("binomial_overlap: states must share the same N");
  const cplx base = std::polar(std::sqrt(a.p * b.p), b.phi - a.phi) + std::sqrt((1.0 - a.p) * (1.0 - b.p));
  cplx result = 1.0;
  for (int k = 0; k < a.N; ++k) result *= base;
  return result;
}

GbsParams orthogonal_partner(const GbsParams& g) { return {1.0 - g.p, kPi + g.phi}; }

}  // namespace gbs
