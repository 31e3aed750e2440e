#pragma once

// Electric-field statistics for the entangled two-cavity state
//   N_eta [ |p1,t1>|1-p2,pi+t2> + eta |1-p1,pi+t1>|p2,t2> ].
// Fields are evaluated at the cavity centre at t = 0 in units where
// sqrt(4 pi hbar omega / V) = 1, so E_j = a_j + a_j^dagger.
//
// Every closed form has an *_operator twin that evaluates the same quantity as
// a direct expectation value on the constructed state vector.

#include <cstddef>

#include "gbs/binomial.hpp"
#include "gbs/fock.hpp"

namespace gbs {

struct EntangledGbsParams {
  double p1;
  double p2;
  double theta1;
  double theta2;
  double eta;

  double normalization() const;  // 1 / sqrt(1 + eta^2)
};

struct FieldStats {
  double e1;
  double e2;
  double e1e2;
  double covariance;
};

struct GbsFieldElements {
  double e11;  // <p,t|E|p,t> = -<1-p,pi+t|E|1-p,pi+t>
  cplx e12;    // <p,t|E|1-p,pi+t>
};

TwoCavityState entangled_gbs_state(const EntangledGbsParams& params, std::size_t n_max = kDefaultNMax);

GbsFieldElements gbs_field_matrix_elements(const GbsParams& g);
GbsFieldElements gbs_field_matrix_elements_operator(const GbsParams& g, std::size_t n_max = kDefaultNMax);

/// f(p1, p2) = (2p1 - 1)(2p2 - 1)
double f_factor(double p1, double p2);
/// h(p1, p2) = 2 sqrt(p1 p2 (1-p1)(1-p2))
double h_factor(double p1, double p2);

/// <E_j> for cavity j in {1, 2}.
double field_expectation(const EntangledGbsParams& params, int cavity);
double field_correlation(const EntangledGbsParams& params);
FieldStats field_covariance(const EntangledGbsParams& params);

double field_expectation_operator(const EntangledGbsParams& params, int cavity, std::size_t n_max = kDefaultNMax);
double field_correlation_operator(const EntangledGbsParams& params, std::size_t n_max = kDefaultNMax);
FieldStats field_covariance_operator(const EntangledGbsParams& params, std::size_t n_max = kDefaultNMax);

}  // namespace gbs
