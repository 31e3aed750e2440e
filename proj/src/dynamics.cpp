#include "gbs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace gbs {

// ------------------------------------------------------------- AtomFieldState

AtomFieldState::AtomFieldState(std::size_t n_max, std::vector<cplx> amplitudes)
    : n_max_(n_max), amps_(std::move(amplitudes)) {
  if (n_max_ < 1) throw std::invalid_argument("AtomFieldState: n_max must be >= 1");
  if (amps_.size() != 2 * (n_max_ + 1)) throw std::invalid_argument("AtomFieldState: size must be 2 (n_max+1)");
  double n2 = 0.0;
  for (const auto& c : amps_) n2 += std::norm(c);
  if (!(n2 > 0.0)) throw std::invalid_argument("AtomFieldState: zero vector");
  for (auto& c : amps_) c /= std::sqrt(n2);
}

AtomFieldState AtomFieldState::product(std::array<cplx, 2> atom, const StateVector& field) {
  const std::size_t d = field.dim();
  std::vector<cplx> amps(2 * d);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t n = 0; n < d; ++n) amps[a * d + n] = atom[a] * field[n];
  return AtomFieldState(field.n_max(), std::move(amps));
}

double AtomFieldState::norm_squared() const {
  double n2 = 0.0;
  for (const auto& c : amps_) n2 += std::norm(c);
  return n2;
}

double AtomFieldState::atom_probability(std::size_t atom) const {
  double w = 0.0;
  for (std::size_t n = 0; n <= n_max_; ++n) w += std::norm((*this)(atom, n));
  return w;
}

StateVector AtomFieldState::field_given(std::size_t atom) const {
  std::vector<cplx> f(n_max_ + 1);
  for (std::size_t n = 0; n <= n_max_; ++n) f[n] = (*this)(atom, n);
  return StateVector(std::move(f));
}

// ------------------------------------------------------------------ unitaries

RamseyParams probe_ramsey(const DichotomicParams& d) {
  if (!(d.p >= 0.0 && d.p <= 1.0)) throw std::invalid_argument("probe_ramsey: p must lie in [0, 1]");
  return {2.0 * std::acos(std::sqrt(d.p)), -d.phi};
}

FieldOperator jc_unitary(double gt, std::size_t n_max) {
  const std::size_t d = n_max + 1;
  FieldOperator u(2 * d);
  const auto up = [d](std::size_t n) { return kUp * d + n; };
  const auto down = [d](std::size_t n) { return kDown * d + n; };
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double r_up = gt * std::sqrt(static_cast<double>(n + 1));
    u(up(n), up(n)) = std::cos(r_up);
    if (n < n_max) u(down(n + 1), up(n)) = -std::sin(r_up);

    const double r_down = gt * std::sqrt(static_cast<double>(n));
    u(down(n), down(n)) = std::cos(r_down);
    if (n > 0) u(up(n - 1), down(n)) = std::sin(r_down);
  }
  return u;
}

FieldOperator ramsey_unitary(const RamseyParams& r) {
  const double c = std::cos(0.5 * r.theta);
  const double s = std::sin(0.5 * r.theta);
  FieldOperator u(2);
  u(kUp, kUp) = c;
  u(kDown, kUp) = -std::polar(s, r.phi);
  u(kUp, kDown) = std::polar(s, -r.phi);
  u(kDown, kDown) = c;
  return u;
}

namespace {

CompositeState as_composite(const AtomFieldState& s) {
  return CompositeState({2, s.n_max() + 1}, std::vector<cplx>(s.amplitudes().begin(), s.amplitudes().end()));
}

AtomFieldState from_composite(const CompositeState& c, std::size_t n_max) {
  return AtomFieldState(n_max, std::vector<cplx>(c.amplitudes().begin(), c.amplitudes().end()));
}

double correlation_from(const std::array<double, 4>& probs) {
  // index a1 * 2 + a2, equal levels give product +1
  return probs[0] + probs[3] - probs[1] - probs[2];
}

}  // namespace

void jc_evolve_sites(CompositeState& state, std::size_t atom_site, std::size_t cavity_site, double gt) {
  const std::size_t d = state.dims()[cavity_site];
  const std::array<std::size_t, 2> sites{atom_site, cavity_site};
  const std::array<std::size_t, 2> top{kUp, d - 1};
  if (state.weight_where(sites, top) > kIdentityTol * kIdentityTol) {
    throw std::domain_error("jc_evolve: Fock cutoff too small (|up, n_max> is populated)");
  }
  state.apply(sites, jc_unitary(gt, d - 1));
}

AtomFieldState jc_evolve(const AtomFieldState& s, double gt) {
  CompositeState c = as_composite(s);
  jc_evolve_sites(c, 0, 1, gt);
  return from_composite(c, s.n_max());
}

AtomFieldState ramsey_rotate(const AtomFieldState& s, const RamseyParams& r) {
  CompositeState c = as_composite(s);
  c.apply({0}, ramsey_unitary(r));
  return from_composite(c, s.n_max());
}

// ---------------------------------------------------------------- probe atom

namespace {

void require_probe_span(const StateVector& field) {
  double outside = 0.0;
  for (std::size_t n = 2; n <= field.n_max(); ++n) outside += std::norm(field[n]);
  if (outside > kSpanTol) throw std::domain_error("probe_measure: state outside measurement span");
}

AtomFieldState probe_sequence(const StateVector& field, const DichotomicParams& d, double gt) {
  const AtomFieldState start = AtomFieldState::product({1.0, 0.0}, field);
  return ramsey_rotate(jc_evolve(start, gt), probe_ramsey(d));
}

}  // namespace

std::array<double, 2> probe_probabilities(const StateVector& field, const DichotomicParams& d, double gt) {
  require_probe_span(field);
  const AtomFieldState out = probe_sequence(field, d, gt);
  return {out.atom_probability(kUp), out.atom_probability(kDown)};
}

ProbeResult probe_measure(const StateVector& field, const DichotomicParams& d, RandomStream& rng, double gt) {
  require_probe_span(field);
  const AtomFieldState out = probe_sequence(field, d, gt);
  const std::array<double, 2> probs{out.atom_probability(kDown), out.atom_probability(kUp)};
  const std::size_t atom = sample_index(probs, rng);
  return {atom == kUp ? +1 : -1, out.field_given(atom)};
}

// ----------------------------------------------------------------- generation

std::array<cplx, 4> InitialAtomPair::amplitudes() const {
  const double n = normalization();
  std::array<cplx, 4> a{};
  a[kUp * 2 + kDown] = n;
  a[kDown * 2 + kUp] = n * eta;
  return a;
}

GenerationResult generate_entangled_gbs(const InitialAtomPair& init, double p1, double theta1, double p2,
                                        double theta2, std::size_t n_max, double gt) {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) {
    throw std::invalid_argument("generate_entangled_gbs: p1, p2 must lie in [0, 1]");
  }
  const std::size_t d = n_max + 1;
  std::vector<cplx> amps(4 * d * d);
  const auto atoms = init.amplitudes();
  for (std::size_t a1 = 0; a1 < 2; ++a1)
    for (std::size_t a2 = 0; a2 < 2; ++a2) amps[((a1 * d + 0) * 2 + a2) * d + 0] = atoms[a1 * 2 + a2];
  CompositeState total({2, d, 2, d}, std::move(amps));

  total.apply({kGenAtom1}, ramsey_unitary(probe_ramsey({p1, theta1})));
  total.apply({kGenAtom2}, ramsey_unitary(probe_ramsey({p2, theta2})));
  jc_evolve_sites(total, kGenAtom1, kGenCavity1, gt);
  jc_evolve_sites(total, kGenAtom2, kGenCavity2, gt);

  const auto m = total.marginal({kGenAtom1, kGenAtom2});
  const std::array<std::size_t, 2> atom_sites{kGenAtom1, kGenAtom2};
  const std::array<std::size_t, 2> ground{kDown, kDown};
  const CompositeState field = total.project(atom_sites, ground);
  std::vector<cplx> field_amps(field.amplitudes().begin(), field.amplitudes().end());
  return {TwoCavityState(n_max, std::move(field_amps)), {m[0], m[1], m[2], m[3]}, std::move(total)};
}

std::array<double, 4> joint_probe_probabilities(const CompositeState& state, std::size_t cavity1_site,
                                                std::size_t cavity2_site, const DichotomicParams& d1,
                                                const DichotomicParams& d2, double gt) {
  const std::array<cplx, 2> ground{1.0, 0.0};
  CompositeState s = state.with_appended(ground).with_appended(ground);
  const std::size_t probe1 = s.dims().size() - 2;
  const std::size_t probe2 = s.dims().size() - 1;
  jc_evolve_sites(s, probe1, cavity1_site, gt);
  jc_evolve_sites(s, probe2, cavity2_site, gt);
  s.apply({probe1}, ramsey_unitary(probe_ramsey(d1)));
  s.apply({probe2}, ramsey_unitary(probe_ramsey(d2)));
  const auto m = s.marginal({probe1, probe2});
  return {m[0], m[1], m[2], m[3]};
}

// ---------------------------------------------------------------- Monte Carlo

namespace {

struct ShardCounts {
  std::array<std::array<std::uint64_t, 4>, 4> outcomes{};  // [setting][a1*2+a2]
  std::array<std::uint64_t, 4> discarded{};
};

void run_shard(const std::array<std::array<double, 4>, 4>& probs, const ExperimentConfig& cfg, std::uint64_t begin,
               std::uint64_t end, ShardCounts& out) {
  const double alpha = cfg.detector_efficiency;
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::uint64_t shot = begin; shot < end; ++shot) {
      RandomStream rng(cfg.seed, k * cfg.shots + shot);
      const std::size_t outcome = sample_index(probs[k], rng);
      if (alpha < 1.0) {
        const bool seen1 = rng.uniform() < alpha;
        const bool seen2 = rng.uniform() < alpha;
        if (!(seen1 && seen2)) {
          ++out.discarded[k];
          continue;
        }
      }
      ++out.outcomes[k][outcome];
    }
  }
}

}  // namespace

BellEstimate run_bell_experiment(const ExperimentConfig& cfg) {
  if (cfg.shots < 1) throw std::invalid_argument("run_bell_experiment: shots must be >= 1");
  if (!(cfg.detector_efficiency >= 0.0 && cfg.detector_efficiency <= 1.0)) {
    throw std::invalid_argument("run_bell_experiment: detector efficiency must lie in [0, 1]");
  }
  if (!cfg.fair_sampling && cfg.detector_efficiency < 1.0) {
    throw std::invalid_argument("run_bell_experiment: only fair-sampling post-selection is supported when alpha < 1");
  }

  BellEstimate est;
  if (std::abs(cfg.bell.p - 0.5) > 1e-12) {
    est.warnings.push_back("p differs from 1/2; the protocol is run as configured");
  }

  const BellConfig& b = cfg.bell;
  const GenerationResult gen = generate_entangled_gbs({b.eta}, b.p, b.theta, b.p, b.theta, cfg.n_max);
  const auto settings = chsh_settings(b.angles);
  std::array<std::array<double, 4>, 4> probs{};
  for (std::size_t k = 0; k < 4; ++k) {
    probs[k] = joint_probe_probabilities(gen.total, kGenCavity1, kGenCavity2, {b.p, settings[k].first},
                                         {b.p, settings[k].second});
  }

  const auto workers = static_cast<std::uint64_t>(std::clamp<std::uint64_t>(cfg.workers, 1, cfg.shots));
  std::vector<ShardCounts> shards(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      const std::uint64_t begin = cfg.shots * w / workers;
      const std::uint64_t end = cfg.shots * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] { run_shard(probs, cfg, begin, end, shards[w]); });
    }
  }
  ShardCounts total;
  for (const auto& s : shards) {
    for (std::size_t k = 0; k < 4; ++k) {
      for (std::size_t o = 0; o < 4; ++o) total.outcomes[k][o] += s.outcomes[k][o];
      total.discarded[k] += s.discarded[k];
    }
  }

  std::array<double, 4> corr{};
  double var = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    SettingEstimate& se = est.settings[k];
    se.phi_a = settings[k].first;
    se.phi_b = settings[k].second;
    se.n_mm = total.outcomes[k][kDown * 2 + kDown];
    se.n_mp = total.outcomes[k][kDown * 2 + kUp];
    se.n_pm = total.outcomes[k][kUp * 2 + kDown];
    se.n_pp = total.outcomes[k][kUp * 2 + kUp];
    se.retained = se.n_mm + se.n_mp + se.n_pm + se.n_pp;
    se.discarded = total.discarded[k];
    se.exact = correlation_from(probs[k]);
    if (se.retained == 0) {
      throw std::runtime_error("run_bell_experiment: no retained shots for setting " + std::to_string(k));
    }
    const auto n = static_cast<double>(se.retained);
    se.correlation = (static_cast<double>(se.n_pp + se.n_mm) - static_cast<double>(se.n_pm + se.n_mp)) / n;
    se.std_error = std::sqrt(std::max(0.0, 1.0 - se.correlation * se.correlation) / n);
    corr[k] = se.correlation;
    var += se.std_error * se.std_error;
    est.discarded_shots += se.discarded;
  }
  est.s_b_hat = chsh_combination(corr);
  est.std_error = std::sqrt(var);
  est.s_b_target = bell_function(b);
  return est;
}

DetectionReport detection_threshold_check(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("detection_threshold_check: alpha must lie in [0, 1]");
  const double alpha_t = 2.0 / (std::sqrt(2.0) + 1.0);
  return {alpha, alpha_t, alpha > alpha_t,
          "threshold for maximally entangled states without the fair-sampling assumption"};
}

// ---------------------------------------------------------------- sensitivity

std::vector<SensitivityRow> timing_sensitivity(const ExperimentConfig& cfg, std::span<const double> relative_errors) {
  const BellConfig& b = cfg.bell;
  const TwoCavityState target = entangled_gbs_state({b.p, b.p, b.theta, b.theta, b.eta}, cfg.n_max);
  const auto settings = chsh_settings(b.angles);

  const auto propagated_s_b = [&](const CompositeState& total, double gt) {
    std::array<double, 4> corr{};
    for (std::size_t k = 0; k < 4; ++k) {
      corr[k] = correlation_from(joint_probe_probabilities(total, kGenCavity1, kGenCavity2,
                                                           {b.p, settings[k].first}, {b.p, settings[k].second}, gt));
    }
    return chsh_combination(corr);
  };

  // shifts are measured against the same propagation at the nominal g*t
  const double nominal =
      propagated_s_b(generate_entangled_gbs({b.eta}, b.p, b.theta, b.p, b.theta, cfg.n_max, kHalfPi).total, kHalfPi);

  std::vector<SensitivityRow> rows;
  rows.reserve(relative_errors.size());
  for (const double eps : relative_errors) {
    if (!(std::abs(eps) < 0.5)) throw std::invalid_argument("timing_sensitivity: |epsilon| must be < 0.5");
    const double gt = kHalfPi * (1.0 + eps);
    const GenerationResult gen = generate_entangled_gbs({b.eta}, b.p, b.theta, b.p, b.theta, cfg.n_max, gt);

    // <target| rho_field |target> with the generation atoms traced out
    double fid = 0.0;
    const std::array<std::size_t, 2> atom_sites{kGenAtom1, kGenAtom2};
    for (std::size_t a1 = 0; a1 < 2; ++a1) {
      for (std::size_t a2 = 0; a2 < 2; ++a2) {
        const std::array<std::size_t, 2> values{a1, a2};
        const CompositeState branch = gen.total.project(atom_sites, values);
        cplx ov{};
        for (std::size_t i = 0; i < branch.size(); ++i) ov += std::conj(target.amplitudes()[i]) * branch.amplitudes()[i];
        fid += std::norm(ov);
      }
    }

    const double s_b = propagated_s_b(gen.total, gt);
    rows.push_back({eps, fid, s_b, s_b - nominal});
  }
  return rows;
}

}  // namespace gbs
