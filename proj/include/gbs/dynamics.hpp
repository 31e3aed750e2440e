#pragma once

// Atom-cavity dynamics in the resonant interaction picture: Jaynes-Cummings
// rotations, Ramsey pulses, the probe-atom readout of F_p(phi), the two-atom
// generation scheme for the entangled cavity state, and Monte Carlo CHSH runs.
//
// Atomic index convention: 0 = ground (down), 1 = excited (up).
// Interaction durations are expressed as the dimensionless phase g*t.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gbs/bell.hpp"
#include "gbs/field.hpp"
#include "gbs/fock.hpp"

namespace gbs {

inline constexpr std::size_t kDown = 0;
inline constexpr std::size_t kUp = 1;
inline constexpr double kHalfPi = kPi / 2.0;

/// Amplitudes over {down, up} (x) {|0>..|n_max>}, index atom * (n_max+1) + n.
class AtomFieldState {
 public:
  AtomFieldState(std::size_t n_max, std::vector<cplx> amplitudes);
  static AtomFieldState product(std::array<cplx, 2> atom, const StateVector& field);

  std::size_t n_max() const { return n_max_; }
  const cplx& operator()(std::size_t atom, std::size_t n) const { return amps_[atom * (n_max_ + 1) + n]; }
  std::span<const cplx> amplitudes() const { return amps_; }
  double norm_squared() const;

  /// Probability of finding the atom in the given level.
  double atom_probability(std::size_t atom) const;
  /// Normalized field state conditioned on the atom level.
  StateVector field_given(std::size_t atom) const;

 private:
  std::size_t n_max_;
  std::vector<cplx> amps_;
};

struct RamseyParams {
  double theta;  // pulse area
  double phi;    // rotation-axis phase
};

/// Ramsey settings that read out F_p(phi): cos(theta/2) = sqrt(p), axis phase -phi.
RamseyParams probe_ramsey(const DichotomicParams& d);

/// Resonant JC propagator on (atom, cavity), atom most significant. The
/// |up, n_max> column cannot be represented; callers must keep it empty.
FieldOperator jc_unitary(double gt, std::size_t n_max);
/// 2x2 atomic rotation in the (down, up) basis.
FieldOperator ramsey_unitary(const RamseyParams& r);

AtomFieldState jc_evolve(const AtomFieldState& s, double gt);
AtomFieldState ramsey_rotate(const AtomFieldState& s, const RamseyParams& r);

/// JC step on a composite register; throws if |up, n_max> is populated.
void jc_evolve_sites(CompositeState& state, std::size_t atom_site, std::size_t cavity_site, double gt);

struct ProbeResult {
  int outcome;  // +1 for an excited atom, -1 for ground
  StateVector post_field;
};

/// Outcome probabilities {P(+1), P(-1)} of the probe sequence on a field.
std::array<double, 2> probe_probabilities(const StateVector& field, const DichotomicParams& d,
                                          double gt = kHalfPi);

/// One probe atom: ground state, JC for g*t, Ramsey readout pulse, detection.
ProbeResult probe_measure(const StateVector& field, const DichotomicParams& d, RandomStream& rng,
                          double gt = kHalfPi);

struct InitialAtomPair {
  double eta;

  double normalization() const { return 1.0 / std::sqrt(1.0 + eta * eta); }
  /// N_eta (|up,down> + eta |down,up>) over (atom1, atom2), row-major.
  std::array<cplx, 4> amplitudes() const;
};

struct GenerationResult {
  /// Field state conditioned on both atoms in the ground state.
  TwoCavityState field;
  /// Atomic outcome probabilities, index a1 * 2 + a2.
  std::array<double, 4> atom_probabilities;
  /// Full register (atom1, cavity1, atom2, cavity2).
  CompositeState total;
};

/// Register sites of the generation scheme.
inline constexpr std::size_t kGenAtom1 = 0, kGenCavity1 = 1, kGenAtom2 = 2, kGenCavity2 = 3;

/// Ramsey zones (theta_j, -theta_j phase) then resonant JC for g*t on each pair.
GenerationResult generate_entangled_gbs(const InitialAtomPair& init, double p1, double theta1, double p2,
                                        double theta2, std::size_t n_max = kDefaultNMax, double gt = kHalfPi);

/// Joint probe readout of cavities inside a register. Returns P(outcome1, outcome2)
/// indexed a1 * 2 + a2 with 0 = ground (-1) and 1 = excited (+1).
std::array<double, 4> joint_probe_probabilities(const CompositeState& state, std::size_t cavity1_site,
                                                std::size_t cavity2_site, const DichotomicParams& d1,
                                                const DichotomicParams& d2, double gt = kHalfPi);

struct ExperimentConfig {
  BellConfig bell;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 42;
  double detector_efficiency = 1.0;
  bool fair_sampling = true;
  std::size_t n_max = kDefaultNMax;
  unsigned workers = 1;
};

struct SettingEstimate {
  double phi_a = 0.0;
  double phi_b = 0.0;
  // counts by (outcome1, outcome2)
  std::uint64_t n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0;
  std::uint64_t retained = 0;
  std::uint64_t discarded = 0;
  double correlation = 0.0;
  double std_error = 0.0;
  double exact = 0.0;  // correlation from the protocol's outcome distribution
};

struct BellEstimate {
  double s_b_hat = 0.0;
  double std_error = 0.0;
  double s_b_target = 0.0;
  std::array<SettingEstimate, 4> settings{};
  std::uint64_t discarded_shots = 0;
  std::vector<std::string> warnings;
};

BellEstimate run_bell_experiment(const ExperimentConfig& cfg);

struct DetectionReport {
  double alpha;
  double alpha_t;
  bool violable;
  std::string note;
};

DetectionReport detection_threshold_check(double alpha);

struct SensitivityRow {
  double epsilon;
  double fidelity;
  double s_b;
  double delta_s_b;
};

/// Deterministic propagation with g*t = (pi/2)(1 + epsilon) in generation and probing.
/// delta_s_b is relative to the same propagation at epsilon = 0.
std::vector<SensitivityRow> timing_sensitivity(const ExperimentConfig& cfg, std::span<const double> relative_errors);

}  // namespace gbs
