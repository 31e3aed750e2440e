#pragma once

// CHSH analysis with the dichotomic field operator
//   F_p(phi) = |p,phi><p,phi| - |1-p,pi+phi><1-p,pi+phi|
// on the symmetric entangled state (p1 = p2 = p, theta1 = theta2 = theta).

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "gbs/binomial.hpp"
#include "gbs/fock.hpp"

namespace gbs {

struct DichotomicParams {
  double p;
  double phi;
};

struct GbsBasisMatrix {
  double f11;
  cplx f12;
};

struct BellAngles {
  double phi1;
  double phi2;
  double phi1_prime;
  double phi2_prime;
};

struct BellConfig {
  double p = 0.5;
  double theta = 0.0;
  double eta = 1.0;
  BellAngles angles{};
};

enum class AnglePreset { maximal, wide };

/// Fock-basis form; zero outside the {|0>, |1>} block.
FieldOperator dichotomic_operator(const DichotomicParams& d, std::size_t n_max = kDefaultNMax);

/// Matrix of F_p(phi_op) in the basis {|p,phi_basis>, |1-p,pi+phi_basis>}.
GbsBasisMatrix dichotomic_gbs_matrix(double p, double phi_basis, double phi_op);
GbsBasisMatrix dichotomic_gbs_matrix_operator(double p, double phi_basis, double phi_op,
                                              std::size_t n_max = kDefaultNMax);

/// Eigenvectors (+1, -1) of F_p(phi_op) assembled from the basis
/// {|p,phi_basis>, |1-p,pi+phi_basis>}. When the matrix is already diagonal the
/// basis pair itself is returned (ordered by eigenvalue).
std::pair<StateVector, StateVector> dichotomic_eigenstates(double p, double phi_basis, double phi_op,
                                                           std::size_t n_max = kDefaultNMax);

/// G = 2|eta| / (1 + eta^2)
double degree_of_entanglement(double eta);
/// The root |eta| <= 1 of degree_of_entanglement(eta) = G.
double eta_for_degree(double G);

/// Closed-form <F(phi_a) (x) F(phi_b)> on the symmetric entangled state.
double bell_correlation(const BellConfig& config, double phi_a, double phi_b);
/// The same correlation as a tensor-operator expectation.
double bell_correlation_operator(const BellConfig& config, double phi_a, double phi_b,
                                 std::size_t n_max = kDefaultNMax);

/// The four correlations in CHSH order (phi1,phi2), (phi1,phi2'), (phi1',phi2), (phi1',phi2').
std::array<std::pair<double, double>, 4> chsh_settings(const BellAngles& a);

/// |C11 - C12| + |C21 + C22| for any four correlations in chsh_settings order.
double chsh_combination(const std::array<double, 4>& c);

double bell_function(const BellConfig& config);
double bell_function_operator(const BellConfig& config, std::size_t n_max = kDefaultNMax);
/// S_B written through G; valid at p = 1/2 only. The inner sign is "-" for
/// eta >= 0 and "+" for eta < 0.
double bell_function_half(const BellConfig& config);

BellAngles angle_preset(AnglePreset kind, double theta, bool eta_negative = false);

/// S_B along the preset as a function of G: maximal -> sqrt2 (1 + G),
/// wide -> 7/4 + 3G/4.
double analytic_s_b(AnglePreset kind, double G);
/// G at which analytic_s_b reaches 2.
double violation_threshold(AnglePreset kind);

/// Config with p = 1/2, the given preset at theta and eta.
BellConfig preset_config(AnglePreset kind, double eta, double theta = 0.0);

struct PScanResult {
  double p_star;
  double s_b_max;
  std::vector<std::pair<double, double>> curve;  // (p, S_B) ascending in p
};

/// Scan p over {0, step, ..., 1} and return the argmax of bell_function;
/// among equal maxima (within 1e-12) the point closest to 1/2 wins.
PScanResult optimal_p_scan(const BellConfig& config_without_p, double step);

}  // namespace gbs
