#pragma once

// Truncated Fock-space states and operators for one or two cavity modes,
// a small tensor-product register for atom/cavity composites, and a
// counter-based random stream for reproducible Born-rule sampling.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace gbs {

using cplx = std::complex<double>;

inline constexpr double kIdentityTol = 1e-12;
inline constexpr double kSpanTol = 1e-10;
inline constexpr std::size_t kDefaultNMax = 2;

/// Amplitudes c_0..c_nmax of a single cavity mode.
class StateVector {
 public:
  /// Normalizes the input; throws if n_max < 1 or the vector is zero.
  explicit StateVector(std::vector<cplx> amplitudes);

  /// Fock state |n> in a space truncated at n_max.
  static StateVector fock(std::size_t n, std::size_t n_max);

  std::size_t n_max() const { return amps_.size() - 1; }
  std::size_t dim() const { return amps_.size(); }
  const cplx& operator[](std::size_t n) const { return amps_[n]; }
  std::span<const cplx> amplitudes() const { return amps_; }
  double norm_squared() const;

 private:
  std::vector<cplx> amps_;
};

/// Square complex matrix, row-major. Serves single-mode operators as well as
/// joint two-cavity operators built with kron().
class FieldOperator {
 public:
  explicit FieldOperator(std::size_t dim);
  FieldOperator(std::size_t dim, std::vector<cplx> row_major);

  static FieldOperator identity(std::size_t dim);
  static FieldOperator annihilation(std::size_t n_max);
  static FieldOperator creation(std::size_t n_max);
  static FieldOperator number(std::size_t n_max);
  /// a + a^dagger, the field quadrature with sqrt(4 pi hbar omega / V) = 1.
  static FieldOperator quadrature(std::size_t n_max);
  /// |a><a| - |b><b| for two single-mode states.
  static FieldOperator projector_difference(const StateVector& a, const StateVector& b);

  std::size_t dim() const { return dim_; }
  cplx& operator()(std::size_t r, std::size_t c) { return m_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return m_[r * dim_ + c]; }

  FieldOperator adjoint() const;
  bool is_hermitian(double tol = kIdentityTol) const;
  double max_abs_diff(const FieldOperator& other) const;

  FieldOperator operator+(const FieldOperator& o) const;
  FieldOperator operator-(const FieldOperator& o) const;
  FieldOperator operator*(const FieldOperator& o) const;
  FieldOperator operator*(cplx s) const;

  std::vector<cplx> apply(std::span<const cplx> v) const;

 private:
  std::size_t dim_;
  std::vector<cplx> m_;
};

/// Kronecker product; index (i, j) of the result is i * b.dim() + j.
FieldOperator kron(const FieldOperator& a, const FieldOperator& b);

/// Joint amplitudes over (cavity 1, cavity 2), both truncated at n_max.
class TwoCavityState {
 public:
  /// Row-major amplitudes of size (n_max+1)^2; normalized on construction.
  TwoCavityState(std::size_t n_max, std::vector<cplx> amplitudes);

  std::size_t n_max() const { return n_max_; }
  std::size_t dim() const { return n_max_ + 1; }
  const cplx& operator()(std::size_t m, std::size_t n) const { return amps_[m * dim() + n]; }
  std::span<const cplx> amplitudes() const { return amps_; }
  double norm_squared() const;

 private:
  std::size_t n_max_;
  std::vector<cplx> amps_;
};

TwoCavityState tensor(const StateVector& a, const StateVector& b);

cplx inner(const StateVector& a, const StateVector& b);
cplx inner(const TwoCavityState& a, const TwoCavityState& b);

/// |<a|b>|^2, insensitive to global phase.
double fidelity(const StateVector& a, const StateVector& b);
double fidelity(const TwoCavityState& a, const TwoCavityState& b);

cplx expectation(const FieldOperator& op, const StateVector& s);
/// op must act on the joint space (dimension (n_max+1)^2).
cplx expectation(const FieldOperator& op, const TwoCavityState& s);
/// <s| a (x) b |s> without materializing the Kronecker product.
cplx expectation(const FieldOperator& a, const FieldOperator& b, const TwoCavityState& s);

/// Counter-based generator. Draw k of stream (seed, stream_id) depends only on
/// those three numbers, so a shot keyed by its index reproduces regardless of
/// how shots are distributed over workers.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Index drawn from a discrete distribution (weights need not sum to exactly 1).
std::size_t sample_index(std::span<const double> probabilities, RandomStream& rng);

struct BornOutcome {
  std::size_t index;
  StateVector collapsed;
};

/// Projective measurement of s in the orthonormal pair {basis.first, basis.second}.
BornOutcome born_sample(const StateVector& s, const std::pair<StateVector, StateVector>& basis,
                        RandomStream& rng);

/// State over a tensor product of small subsystems, first site most significant.
/// Used for atom/cavity composites in the dynamics code.
class CompositeState {
 public:
  /// Product state of the given factors (each normalized).
  static CompositeState product(std::initializer_list<std::vector<cplx>> factors);
  static CompositeState product(const std::vector<std::vector<cplx>>& factors);

  CompositeState(std::vector<std::size_t> dims, std::vector<cplx> amplitudes);

  std::span<const std::size_t> dims() const { return dims_; }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::size_t size() const { return amps_.size(); }
  double norm_squared() const;

  /// Apply a unitary over the listed sites (row-major, dimension = product of
  /// those sites' dims, first listed site most significant).
  void apply(std::span<const std::size_t> sites, const FieldOperator& u);
  void apply(std::initializer_list<std::size_t> sites, const FieldOperator& u) {
    apply(std::span<const std::size_t>(sites.begin(), sites.size()), u);
  }

  /// Joint outcome probabilities over the listed sites (row-major).
  std::vector<double> marginal(std::span<const std::size_t> sites) const;
  std::vector<double> marginal(std::initializer_list<std::size_t> sites) const {
    return marginal(std::span<const std::size_t>(sites.begin(), sites.size()));
  }

  /// Total weight of basis states where sites[k] == values[k] for every k.
  double weight_where(std::span<const std::size_t> sites, std::span<const std::size_t> values) const;

  /// Unnormalized projection onto sites[k] == values[k]; those sites are removed.
  CompositeState project(std::span<const std::size_t> sites, std::span<const std::size_t> values) const;

  /// Append a site in the given (normalized) state as the least significant factor.
  CompositeState with_appended(std::span<const cplx> factor) const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> strides_;
  std::vector<cplx> amps_;
};

}  // namespace gbs
