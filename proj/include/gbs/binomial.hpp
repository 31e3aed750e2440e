#pragma once

// Generalized binomial states |N, p, phi> and their N = 1 special case, the
// generalized Bernoulli state |p, phi> = sqrt(1-p)|0> + e^{i phi} sqrt(p)|1>.

#include <cstddef>

#include "gbs/fock.hpp"

namespace gbs {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kMaxBinomialN = 64;

/// Reduce an angle to (-pi, pi].
double wrap_phase(double phi);

/// Difference of two angles reduced to (-pi, pi].
double phase_distance(double a, double b);

struct BinomialParams {
  int N;
  double p;
  double phi;

  /// Validates ranges and stores phi reduced to (-pi, pi].
  BinomialParams(int n, double prob, double phase);
};

struct GbsParams {
  double p;
  double phi;

  GbsParams(double prob, double phase);

  BinomialParams as_binomial() const { return {1, p, phi}; }
};

/// C(N, n) by multiplicative recurrence.
double binomial_coefficient(int N, int n);

StateVector binomial_state(const BinomialParams& params, std::size_t n_max = kDefaultNMax);
StateVector gbs_state(const GbsParams& g, std::size_t n_max = kDefaultNMax);

/// Closed form (e^{i(phi'-phi)} sqrt(p p') + sqrt((1-p)(1-p')))^N.
cplx binomial_overlap(const BinomialParams& a, const BinomialParams& b);

/// (1-p, pi+phi), the unique GBS orthogonal to g.
GbsParams orthogonal_partner(const GbsParams& g);

}  // namespace gbs
