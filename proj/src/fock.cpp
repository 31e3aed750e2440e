#include "gbs/fock.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gbs {

namespace {

double sum_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s;
}

void normalize_in_place(std::vector<cplx>& v, const char* what) {
  const double n2 = sum_norm(v);
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw std::invalid_argument(std::string(what) + ": zero or non-finite vector");
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& c : v) c *= inv;
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 2) throw std::invalid_argument("StateVector: n_max must be >= 1");
  normalize_in_place(amps_, "StateVector");
}

StateVector StateVector::fock(std::size_t n, std::size_t n_max) {
  if (n > n_max) throw std::invalid_argument("StateVector::fock: n exceeds n_max");
  std::vector<cplx> v(n_max + 1);
  v[n] = 1.0;
  return StateVector(std::move(v));
}

double StateVector::norm_squared() const { return sum_norm(amps_); }

// -------------------------------------------------------------- FieldOperator

FieldOperator::FieldOperator(std::size_t dim) : dim_(dim), m_(dim * dim) {}

FieldOperator::FieldOperator(std::size_t dim, std::vector<cplx> row_major)
    : dim_(dim), m_(std::move(row_major)) {
  if (m_.size() != dim_ * dim_) throw std::invalid_argument("FieldOperator: size is not dim^2");
}

FieldOperator FieldOperator::identity(std::size_t dim) {
  FieldOperator op(dim);
  for (std::size_t i = 0; i < dim; ++i) op(i, i) = 1.0;
  return op;
}

FieldOperator FieldOperator::annihilation(std::size_t n_max) {
  FieldOperator op(n_max + 1);
  for (std::size_t n = 1; n <= n_max; ++n) op(n - 1, n) = std::sqrt(static_cast<double>(n));
  return op;
}

FieldOperator FieldOperator::creation(std::size_t n_max) { return annihilation(n_max).adjoint(); }

FieldOperator FieldOperator::number(std::size_t n_max) {
  FieldOperator op(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) op(n, n) = static_cast<double>(n);
  return op;
}

FieldOperator FieldOperator::quadrature(std::size_t n_max) {
  return annihilation(n_max) + creation(n_max);
}

FieldOperator FieldOperator::projector_difference(const StateVector& a, const StateVector& b) {
  require_same_dim(a.dim(), b.dim(), "projector_difference");
  FieldOperator op(a.dim());
  for (std::size_t r = 0; r < a.dim(); ++r) {
    for (std::size_t c = 0; c < a.dim(); ++c) {
      op(r, c) = a[r] * std::conj(a[c]) - b[r] * std::conj(b[c]);
    }
  }
  return op;
}

FieldOperator FieldOperator::adjoint() const {
  FieldOperator out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

bool FieldOperator::is_hermitian(double tol) const { return max_abs_diff(adjoint()) <= tol; }

double FieldOperator::max_abs_diff(const FieldOperator& other) const {
  require_same_dim(dim_, other.dim_, "FieldOperator::max_abs_diff");
  double d = 0.0;
  for (std::size_t i = 0; i < m_.size(); ++i) d = std::max(d, std::abs(m_[i] - other.m_[i]));
  return d;
}

FieldOperator FieldOperator::operator+(const FieldOperator& o) const {
  require_same_dim(dim_, o.dim_, "FieldOperator::operator+");
  FieldOperator out(*this);
  for (std::size_t i = 0; i < m_.size(); ++i) out.m_[i] += o.m_[i];
  return out;
}

FieldOperator FieldOperator::operator-(const FieldOperator& o) const { return *this + o * -1.0; }

FieldOperator FieldOperator::operator*(const FieldOperator& o) const {
  require_same_dim(dim_, o.dim_, "FieldOperator::operator*");
  FieldOperator out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t k = 0; k < dim_; ++k) {
      const cplx a = (*this)(r, k);
      if (a == cplx{}) continue;
      for (std::size_t c = 0; c < dim_; ++c) out(r, c) += a * o(k, c);
    }
  return out;
}

FieldOperator FieldOperator::operator*(cplx s) const {
  FieldOperator out(*this);
  for (auto& x : out.m_) x *= s;
  return out;
}

std::vector<cplx> FieldOperator::apply(std::span<const cplx> v) const {
  require_same_dim(dim_, v.size(), "FieldOperator::apply");
  std::vector<cplx> out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    cplx acc{};
    for (std::size_t c = 0; c < dim_; ++c) acc += (*this)(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

FieldOperator kron(const FieldOperator& a, const FieldOperator& b) {
  const std::size_t db = b.dim();
  FieldOperator out(a.dim() * db);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) out(i * db + k, j * db + l) = a(i, j) * b(k, l);
  return out;
}

// ------------------------------------------------------------- TwoCavityState

TwoCavityState::TwoCavityState(std::size_t n_max, std::vector<cplx> amplitudes)
    : n_max_(n_max), amps_(std::move(amplitudes)) {
  if (n_max_ < 1) throw std::invalid_argument("TwoCavityState: n_max must be >= 1");
  require_same_dim(amps_.size(), (n_max_ + 1) * (n_max_ + 1), "TwoCavityState");
  normalize_in_place(amps_, "TwoCavityState");
}

double TwoCavityState::norm_squared() const { return sum_norm(amps_); }

TwoCavityState tensor(const StateVector& a, const StateVector& b) {
  require_same_dim(a.n_max(), b.n_max(), "tensor");
  const std::size_t d = a.dim();
  std::vector<cplx> amps(d * d);
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t n = 0; n < d; ++n) amps[m * d + n] = a[m] * b[n];
  return TwoCavityState(a.n_max(), std::move(amps));
}

namespace {
cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}
}  // namespace

cplx inner(const StateVector& a, const StateVector& b) {
  require_same_dim(a.dim(), b.dim(), "inner");
  return dot(a.amplitudes(), b.amplitudes());
}

cplx inner(const TwoCavityState& a, const TwoCavityState& b) {
  require_same_dim(a.n_max(), b.n_max(), "inner");
  return dot(a.amplitudes(), b.amplitudes());
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }
double fidelity(const TwoCavityState& a, const TwoCavityState& b) { return std::norm(inner(a, b)); }

cplx expectation(const FieldOperator& op, const StateVector& s) {
  require_same_dim(op.dim(), s.dim(), "expectation");
  return dot(s.amplitudes(), op.apply(s.amplitudes()));
}

cplx expectation(const FieldOperator& op, const TwoCavityState& s) {
  require_same_dim(op.dim(), s.amplitudes().size(), "expectation");
  return dot(s.amplitudes(), op.apply(s.amplitudes()));
}

cplx expectation(const FieldOperator& a, const FieldOperator& b, const TwoCavityState& s) {
  require_same_dim(a.dim(), s.dim(), "expectation");
  require_same_dim(b.dim(), s.dim(), "expectation");
  const std::size_t d = s.dim();
  cplx acc{};
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t n = 0; n < d; ++n) {
      cplx v{};
      for (std::size_t mp = 0; mp < d; ++mp)
        for (std::size_t np = 0; np < d; ++np) v += a(m, mp) * b(n, np) * s(mp, np);
      acc += std::conj(s(m, n)) * v;
    }
  return acc;
}

// --------------------------------------------------------------- RandomStream

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(mix64(seed ^ mix64(stream_id + kGolden))) {}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RandomStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::size_t sample_index(std::span<const double> probabilities, RandomStream& rng) {
  if (probabilities.empty()) throw std::invalid_argument("sample_index: empty distribution");
  const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("sample_index: zero total weight");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    acc += probabilities[k];
    if (u < acc) return k;
  }
  // u landed in the rounding gap at the top; return the last non-empty bin
  for (std::size_t k = probabilities.size(); k-- > 0;)
    if (probabilities[k] > 0.0) return k;
  return probabilities.size() - 1;
}

BornOutcome born_sample(const StateVector& s, const std::pair<StateVector, StateVector>& basis,
                        RandomStream& rng) {
  const auto& [b0, b1] = basis;
  require_same_dim(s.dim(), b0.dim(), "born_sample");
  require_same_dim(s.dim(), b1.dim(), "born_sample");
  if (std::abs(inner(b0, b1)) > kSpanTol) {
    throw std::invalid_argument("born_sample: measurement basis is not orthonormal");
  }
  const double w0 = std::norm(inner(b0, s));
  const double w1 = std::norm(inner(b1, s));
  if (s.norm_squared() - (w0 + w1) > kSpanTol) {
    throw std::domain_error("born_sample: state outside measurement span");
  }
  const std::array<double, 2> probs{w0, w1};
  const std::size_t k = sample_index(probs, rng);
  return {k, k == 0 ? b0 : b1};
}

// ------------------------------------------------------------- CompositeState

CompositeState::CompositeState(std::vector<std::size_t> dims, std::vector<cplx> amplitudes)
    : dims_(std::move(dims)), strides_(dims_.size()), amps_(std::move(amplitudes)) {
  std::size_t total = 1;
  for (std::size_t k = dims_.size(); k-- > 0;) {
    if (dims_[k] == 0) throw std::invalid_argument("CompositeState: zero-dimensional site");
    strides_[k] = total;
    total *= dims_[k];
  }
  require_same_dim(amps_.size(), total, "CompositeState");
}

CompositeState CompositeState::product(const std::vector<std::vector<cplx>>& factors) {
  std::vector<std::size_t> dims;
  std::vector<cplx> amps{1.0};
  for (auto f : factors) {
    normalize_in_place(f, "CompositeState::product");
    std::vector<cplx> next(amps.size() * f.size());
    for (std::size_t i = 0; i < amps.size(); ++i)
      for (std::size_t j = 0; j < f.size(); ++j) next[i * f.size() + j] = amps[i] * f[j];
    amps = std::move(next);
    dims.push_back(f.size());
  }
  return CompositeState(std::move(dims), std::move(amps));
}

CompositeState CompositeState::product(std::initializer_list<std::vector<cplx>> factors) {
  return product(std::vector<std::vector<cplx>>(factors));
}

double CompositeState::norm_squared() const { return sum_norm(amps_); }

void CompositeState::apply(std::span<const std::size_t> sites, const FieldOperator& u) {
  std::size_t local = 1;
  for (auto s : sites) {
    if (s >= dims_.size()) throw std::out_of_range("CompositeState::apply: bad site");
    local *= dims_[s];
  }
  require_same_dim(u.dim(), local, "CompositeState::apply");

  // offsets of each local basis state relative to the block base index
  std::vector<std::size_t> offsets(local);
  for (std::size_t l = 0; l < local; ++l) {
    std::size_t rem = l, off = 0;
    for (std::size_t k = sites.size(); k-- > 0;) {
      const std::size_t d = dims_[sites[k]];
      off += (rem % d) * strides_[sites[k]];
      rem /= d;
    }
    offsets[l] = off;
  }
  std::vector<bool> is_site(dims_.size(), false);
  for (auto s : sites) is_site[s] = true;

  std::vector<cplx> in(local), out(local);
  for (std::size_t base = 0; base < amps_.size(); ++base) {
    bool zero_on_sites = true;
    for (std::size_t k = 0; k < dims_.size() && zero_on_sites; ++k)
      if (is_site[k] && (base / strides_[k]) % dims_[k] != 0) zero_on_sites = false;
    if (!zero_on_sites) continue;
    for (std::size_t l = 0; l < local; ++l) in[l] = amps_[base + offsets[l]];
    for (std::size_t r = 0; r < local; ++r) {
      cplx acc{};
      for (std::size_t c = 0; c < local; ++c) acc += u(r, c) * in[c];
      out[r] = acc;
    }
    for (std::size_t l = 0; l < local; ++l) amps_[base + offsets[l]] = out[l];
  }
}

std::vector<double> CompositeState::marginal(std::span<const std::size_t> sites) const {
  std::size_t local = 1;
  for (auto s : sites) local *= dims_.at(s);
  std::vector<double> probs(local, 0.0);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    std::size_t idx = 0;
    for (auto s : sites) idx = idx * dims_[s] + (i / strides_[s]) % dims_[s];
    probs[idx] += std::norm(amps_[i]);
  }
  return probs;
}

double CompositeState::weight_where(std::span<const std::size_t> sites,
                                    std::span<const std::size_t> values) const {
  require_same_dim(sites.size(), values.size(), "CompositeState::weight_where");
  double w = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < sites.size() && match; ++k)
      match = (i / strides_[sites[k]]) % dims_[sites[k]] == values[k];
    if (match) w += std::norm(amps_[i]);
  }
  return w;
}

CompositeState CompositeState::project(std::span<const std::size_t> sites,
                                       std::span<const std::size_t> values) const {
  require_same_dim(sites.size(), values.size(), "CompositeState::project");
  std::vector<bool> removed(dims_.size(), false);
  for (auto s : sites) removed.at(s) = true;
  std::vector<std::size_t> kept_dims;
  for (std::size_t k = 0; k < dims_.size(); ++k)
    if (!removed[k]) kept_dims.push_back(dims_[k]);
  if (kept_dims.empty()) kept_dims.push_back(1);

  std::vector<cplx> out;
  out.reserve(amps_.size());
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < sites.size() && match; ++k)
      match = (i / strides_[sites[k]]) % dims_[sites[k]] == values[k];
    if (match) out.push_back(amps_[i]);
  }
  return CompositeState(std::move(kept_dims), std::move(out));
}

CompositeState CompositeState::with_appended(std::span<const cplx> factor) const {
  std::vector<cplx> f(factor.begin(), factor.end());
  normalize_in_place(f, "CompositeState::with_appended");
  std::vector<cplx> next(amps_.size() * f.size());
  for (std::size_t i = 0; i < amps_.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j) next[i * f.size() + j] = amps_[i] * f[j];
  auto dims = dims_;
  dims.push_back(f.size());
  return CompositeState(std::move(dims), std::move(next));
}

}  // namespace gbs
