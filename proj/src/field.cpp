#include "gbs/field.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gbs {

double EntangledGbsParams::normalization() const { return 1.0 / std::sqrt(1.0 + eta * eta); }

TwoCavityState entangled_gbs_state(const EntangledGbsParams& params, std::size_t n_max) {
  const GbsParams a1{params.p1, params.theta1};
  const GbsParams a2{params.p2, params.theta2};
  const StateVector s1 = gbs_state(a1, n_max);
  const StateVector s1_perp = gbs_state(orthogonal_partner(a1), n_max);
  const StateVector s2 = gbs_state(a2, n_max);
  const StateVector s2_perp = gbs_state(orthogonal_partner(a2), n_max);

  const TwoCavityState first = tensor(s1, s2_perp);
  const TwoCavityState second = tensor(s1_perp, s2);
  const double norm = params.normalization();
  std::vector<cplx> amps(first.amplitudes().size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    amps[i] = norm * (first.amplitudes()[i] + params.eta * second.amplitudes()[i]);
  }
  return TwoCavityState(n_max, std::move(amps));
}

GbsFieldElements gbs_field_matrix_elements(const GbsParams& g) {
  const double c = std::cos(g.phi);
  const double s = std::sin(g.phi);
  return {2.0 * std::sqrt(g.p * (1.0 - g.p)) * c, cplx{(2.0 * g.p - 1.0) * c, -s}};
}

GbsFieldElements gbs_field_matrix_elements_operator(const GbsParams& g, std::size_t n_max) {
  const StateVector s = gbs_state(g, n_max);
  const StateVector perp = gbs_state(orthogonal_partner(g), n_max);
  const FieldOperator e = FieldOperator::quadrature(n_max);
  const std::vector<cplx> e_perp = e.apply(perp.amplitudes());
  cplx e12{};
  for (std::size_t n = 0; n < s.dim(); ++n) e12 += std::conj(s[n]) * e_perp[n];
  return {expectation(e, s).real(), e12};
}

double f_factor(double p1, double p2) { return (2.0 * p1 - 1.0) * (2.0 * p2 - 1.0); }

double h_factor(double p1, double p2) { return 2.0 * std::sqrt(p1 * p2 * (1.0 - p1) * (1.0 - p2)); }

namespace {

double imbalance(double eta) { return (1.0 - eta * eta) / (1.0 + eta * eta); }

void require_cavity(int cavity) {
  if (cavity != 1 && cavity != 2) throw std::invalid_argument("cavity index must be 1 or 2");
}

// common factor eta/(1+eta^2) [f c1 c2 + s1 s2]
double coherence_term(const EntangledGbsParams& q) {
  return q.eta / (1.0 + q.eta * q.eta) *
         (f_factor(q.p1, q.p2) * std::cos(q.theta1) * std::cos(q.theta2) +
          std::sin(q.theta1) * std::sin(q.theta2));
}

}  // namespace

double field_expectation(const EntangledGbsParams& params, int cavity) {
  require_cavity(cavity);
  const double p = cavity == 1 ? params.p1 : params.p2;
  const double theta = cavity == 1 ? params.theta1 : params.theta2;
  const double sign = cavity == 1 ? 1.0 : -1.0;
  return sign * 2.0 * std::sqrt(p * (1.0 - p)) * imbalance(params.eta) * std::cos(theta);
}

double field_correlation(const EntangledGbsParams& params) {
  const double cc = std::cos(params.theta1) * std::cos(params.theta2);
  return 2.0 * (coherence_term(params) - h_factor(params.p1, params.p2) * cc);
}

FieldStats field_covariance(const EntangledGbsParams& params) {
  const double cc = std::cos(params.theta1) * std::cos(params.theta2);
  const double r = imbalance(params.eta);
  const double cov = 2.0 * (coherence_term(params) - (1.0 - r * r) * h_factor(params.p1, params.p2) * cc);
  return {field_expectation(params, 1), field_expectation(params, 2), field_correlation(params), cov};
}

double field_expectation_operator(const EntangledGbsParams& params, int cavity, std::size_t n_max) {
  require_cavity(cavity);
  const TwoCavityState psi = entangled_gbs_state(params, n_max);
  const FieldOperator e = FieldOperator::quadrature(n_max);
  const FieldOperator id = FieldOperator::identity(n_max + 1);
  return (cavity == 1 ? expectation(e, id, psi) : expectation(id, e, psi)).real();
}

double field_correlation_operator(const EntangledGbsParams& params, std::size_t n_max) {
  const TwoCavityState psi = entangled_gbs_state(params, n_max);
  const FieldOperator e = FieldOperator::quadrature(n_max);
  return expectation(kron(e, e), psi).real();
}

FieldStats field_covariance_operator(const EntangledGbsParams& params, std::size_t n_max) {
  const double e1 = field_expectation_operator(params, 1, n_max);
  const double e2 = field_expectation_operator(params, 2, n_max);
  const double e1e2 = field_correlation_operator(params, n_max);
  return {e1, e2, e1e2, e1e2 - e1 * e2};
}

}  // namespace gbs
