#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "gbs/fock.hpp"
#include "oracle.hpp"

using namespace gbs;

namespace {

StateVector random_state(std::mt19937_64& gen, std::size_t n_max) {
  std::normal_distribution<double> g;
  std::vector<cplx> a(n_max + 1);
  for (auto& c : a) c = {g(gen), g(gen)};
  return StateVector(std::move(a));
}

}  // namespace

TEST_SUITE("fock") {
  TEST_CASE("state vectors are normalized on construction") {
    const StateVector s({cplx{3.0, 0.0}, cplx{0.0, 4.0}});
    CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(s[1] - cplx{0.0, 0.8}) < 1e-15);
    CHECK_THROWS_AS(StateVector({cplx{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(StateVector({cplx{}, cplx{}}), std::invalid_argument);
    CHECK_THROWS_AS(StateVector::fock(3, 2), std::invalid_argument);
  }

  TEST_CASE("ladder operators match the reference matrices") {
    for (std::size_t n_max : {1u, 2u, 5u}) {
      const auto a = oracle::to_eigen(FieldOperator::annihilation(n_max));
      CHECK((a - oracle::annihilation(n_max + 1)).norm() < 1e-15);
      const auto e = FieldOperator::quadrature(n_max);
      CHECK(e.is_hermitian());
      CHECK((oracle::to_eigen(e) - oracle::quadrature(n_max + 1)).norm() < 1e-15);
      const auto num = FieldOperator::creation(n_max) * FieldOperator::annihilation(n_max);
      CHECK(num.max_abs_diff(FieldOperator::number(n_max)) < 1e-15);
    }
  }

  TEST_CASE("kron and the factored two-mode expectation agree with the reference") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 50; ++trial) {
      const StateVector u = random_state(gen, 2);
      const StateVector v = random_state(gen, 2);
      const FieldOperator e = FieldOperator::quadrature(2);
      const FieldOperator n = FieldOperator::number(2);
      const TwoCavityState s = tensor(u, v);
      const cplx direct = expectation(kron(e, n), s);
      const cplx factored = expectation(e, n, s);
      const cplx ref = oracle::expect(oracle::kron(oracle::quadrature(3), oracle::to_eigen(n)),
                                      oracle::kron(oracle::to_eigen(u), oracle::to_eigen(v)));
      CHECK(std::abs(direct - ref) < 1e-12);
      CHECK(std::abs(factored - ref) < 1e-12);
      // product state factorizes
      CHECK(std::abs(factored - expectation(e, u) * expectation(n, v)) < 1e-12);
    }
  }

  TEST_CASE("fidelity ignores global phase") {
    std::mt19937_64 gen(11);
    const StateVector a = random_state(gen, 3);
    std::vector<cplx> rotated(a.amplitudes().begin(), a.amplitudes().end());
    for (auto& c : rotated) c *= std::polar(1.0, 1.234);
    CHECK(fidelity(a, StateVector(rotated)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(StateVector::fock(0, 2), StateVector::fock(1, 2)) == 0.0);
  }

  TEST_CASE("random streams are keyed by seed and stream id") {
    RandomStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool differs_stream = false, differs_seed = false;
    for (int i = 0; i < 100; ++i) {
      const auto x = a.next_u64();
      CHECK(x == b.next_u64());
      differs_stream |= x != c.next_u64();
      differs_seed |= x != d.next_u64();
    }
    CHECK(differs_stream);
    CHECK(differs_seed);
    CHECK(a.counter() == 100);
  }

  TEST_CASE("uniform draws are in [0, 1) with the right mean and variance") {
    RandomStream r(1);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
      sum2 += u * u;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sum2 / n - mean * mean - 1.0 / 12.0) < 2e-3);
  }

  TEST_CASE("sample_index follows the given weights") {
    const std::array<double, 3> w{0.2, 0.5, 0.3};
    std::array<int, 3> counts{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      RandomStream r(9, static_cast<std::uint64_t>(i));
      ++counts[sample_index(w, r)];
    }
    for (std::size_t k = 0; k < 3; ++k) {
      const double sigma = std::sqrt(w[k] * (1.0 - w[k]) / n);
      CHECK(std::abs(counts[k] / double(n) - w[k]) < 5.0 * sigma);
    }
    const std::array<double, 2> zero{0.0, 0.0};
    RandomStream r(1);
    CHECK_THROWS_AS(sample_index(zero, r), std::invalid_argument);
  }

  TEST_CASE("born_sample collapses onto the drawn basis state") {
    const StateVector up = StateVector({cplx{1.0}, cplx{1.0}, cplx{}});
    const StateVector dn = StateVector({cplx{1.0}, cplx{-1.0}, cplx{}});
    RandomStream r(3);
    const auto out = born_sample(StateVector::fock(0, 2), {up, dn}, r);
    CHECK(fidelity(out.collapsed, out.index == 0 ? up : dn) == doctest::Approx(1.0));
    CHECK_THROWS_AS(born_sample(StateVector::fock(2, 2), {up, dn}, r), std::domain_error);
  }

  TEST_CASE("composite register: apply, marginal and project match the dense reference") {
    std::mt19937_64 gen(5);
    const StateVector f = random_state(gen, 2);
    const std::vector<cplx> atom{cplx{0.6}, cplx{0.0, 0.8}};
    CompositeState s = CompositeState::product({atom, std::vector<cplx>(f.amplitudes().begin(), f.amplitudes().end()), atom});
    CHECK(s.norm_squared() == doctest::Approx(1.0));

    const FieldOperator u = FieldOperator::projector_difference(StateVector({cplx{1.0}, cplx{1.0}}),
                                                                StateVector({cplx{1.0}, cplx{-1.0}}));
    s.apply({2}, u);
    const oracle::Vec ref = oracle::kron(oracle::kron(oracle::to_eigen(std::span<const cplx>(atom)), oracle::to_eigen(f)),
                                         oracle::Vec(oracle::to_eigen(u) * oracle::to_eigen(std::span<const cplx>(atom))));
    CHECK((oracle::to_eigen(s.amplitudes()) - ref).norm() < 1e-14);

    const auto m = s.marginal({0});
    CHECK(m[0] == doctest::Approx(0.36));
    CHECK(m[0] + m[1] == doctest::Approx(1.0));

    const std::array<std::size_t, 1> site{0};
    const std::array<std::size_t, 1> value{1};
    const CompositeState p = s.project(site, value);
    CHECK(p.dims().size() == 2);
    CHECK(p.norm_squared() == doctest::Approx(0.64));
    CHECK(s.weight_where(site, value) == doctest::Approx(0.64));
  }
}
