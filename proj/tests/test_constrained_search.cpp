#include "catch_amalgamated.hpp"

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rdmft/constrained_search.hpp"
#include "rdmft/energy.hpp"

using namespace rdmft;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

OneParticleRdm random_point(std::mt19937_64& rng, double d_min) {
  std::uniform_real_distribution<double> ud(d_min, 0.5 - 1e-3), uphi(0, 2 * kPi);
  return OneParticleRdm::from_polar(ud(rng), uphi(rng));
}

}  // namespace

TEST_CASE("interaction expectation of simple states") {
  CHECK_THAT(interaction_expectation(ConfigurationVector::configuration(2, 1)), WithinAbs(0, 1e-15));
  CHECK_THAT(interaction_expectation(ConfigurationVector::configuration(2, 2)), WithinAbs(2, 1e-15));
  CHECK_THAT(interaction_expectation(ConfigurationVector::configuration(4, 2)), WithinAbs(4, 1e-15));
  const ConfigurationVector bonding(Eigen::Vector3d(0.5, 1 / std::sqrt(2.0), 0.5));
  CHECK_THAT(interaction_expectation(bonding), WithinAbs(1, 1e-15));
}

TEST_CASE("closed-form N = 2 values") {
  CHECK_THAT(functional_pure_analytic_n2(OneParticleRdm(1, 0)), WithinAbs(2, 1e-14));
  CHECK_THAT(functional_pure_analytic_n2(OneParticleRdm(0.5, 0.5)), WithinAbs(1, 1e-14));
  CHECK_THAT(functional_pure_analytic_n2(OneParticleRdm(0.5, 0.25)),
             WithinAbs(oracle::pure_functional_n2_sweep(0.5, 0.25), 1e-10));
  CHECK_THROWS_AS(functional_pure_analytic_n2(OneParticleRdm(0.5, 0)), Error);
}

TEST_CASE("numeric search reproduces simple values") {
  const auto f = functional_pure_numeric(OneParticleRdm(0.5, 0.5), 2);
  REQUIRE(f.converged);
  CHECK_THAT(f.value, WithinAbs(1, 1e-8));
  const auto g = functional_pure_numeric(OneParticleRdm(0.5, 0.25), 2);
  REQUIRE(g.converged);
  CHECK_THAT(g.value, WithinAbs(oracle::pure_functional_n2_sweep(0.5, 0.25), 1e-8));
  CHECK(g.residual_ll < 1e-9);
  CHECK(g.residual_lr < 1e-9);
  CHECK_THAT(interaction_expectation(g.minimizer), WithinAbs(g.value, 1e-12));
  CHECK(rdm_from_state(g.minimizer).frobenius_distance(OneParticleRdm(0.5, 0.25)) < 1e-8);
}

TEST_CASE("N = 2 agrees with an independent sweep of the constraint manifold") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 12; ++k) {
    const auto g = random_point(rng, 1e-3);
    const double oracle_value = oracle::pure_functional_n2_sweep(g.gamma_ll(), g.gamma_lr());
    const auto f = functional_pure_numeric(g, 2);
    REQUIRE(f.converged);
    CHECK_THAT(f.value, WithinAbs(oracle_value, 1e-8));
    CHECK_THAT(functional_pure_analytic_n2(g), WithinAbs(oracle_value, 1e-8));
  }
}

TEST_CASE("N = 3 agrees with an independent sweep of the constraint manifold") {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 5; ++k) {
    const auto g = random_point(rng, 0.02);
    const double coarse = oracle::pure_functional_n3_sweep(g.gamma_ll(), g.gamma_lr(), 400, 400);
    const double fine = oracle::pure_functional_n3_sweep(g.gamma_ll(), g.gamma_lr(), 4000, 800);
    const auto f = functional_pure_numeric(g, 3);
    REQUIRE(f.converged);
    // the sweep only finds feasible points, so it bounds F from above and
    // tightens with the a1 resolution
    CHECK(f.value <= fine + 1e-9);
    CHECK(fine - f.value <= 0.25 * (coarse - f.value) + 1e-6);
    CHECK_THAT(f.value, WithinAbs(fine, 2e-3));
  }
}

TEST_CASE("boundary values equal the condensate interaction") {
  for (int n = 2; n <= 8; ++n) {
    for (int k = 0; k < 32; ++k) {
      const double phi = 2 * kPi * (k + 0.5) / 32;
      const double expected = interaction_expectation(ConfigurationVector::condensate(n, phi));
      CHECK_THAT(functional_boundary_value(n, phi), WithinAbs(expected, 1e-10 * n * n));
      const auto f = functional_pure_numeric(OneParticleRdm::from_polar(0, phi), n);
      REQUIRE(f.converged);
      CHECK_THAT(f.value, WithinAbs(expected, 1e-7 * n * n));
    }
  }
}

TEST_CASE("configuration points carry the configuration interaction") {
  for (int n = 1; n <= 10; ++n) {
    for (int m = 0; m <= n; ++m) {
      const double expected = interaction_weight<double>(n, m);
      CHECK_THAT(functional_configuration_value(n, m), WithinAbs(expected, 1e-12));
      if (2 * m == n) continue;  // the disc center
      const auto f = functional_pure_numeric(OneParticleRdm(double(m) / n, 0), n);
      REQUIRE(f.converged);
      CHECK_THAT(f.value, WithinAbs(expected, 1e-7 * n * n));
    }
  }
}

TEST_CASE("property: left-right and gauge symmetries") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 5;
    const auto g = random_point(rng, 0.01);
    const double f = functional_pure_numeric(g, n).value;
    const double mirror = functional_pure_numeric(OneParticleRdm(1 - g.gamma_ll(), g.gamma_lr()), n).value;
    const double gauge = functional_pure_numeric(OneParticleRdm(g.gamma_ll(), -g.gamma_lr()), n).value;
    CHECK_THAT(mirror, WithinAbs(f, 1e-7 * n * n));
    CHECK_THAT(gauge, WithinAbs(f, 1e-7 * n * n));
  }
}

TEST_CASE("property: total energy is linear in U") {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 10; ++k) {
    const auto g = random_point(rng, 0.01);
    DimerParams p;
    p.n_particles = 3;
    p.potential_left = 0.2;
    p.interaction = 0;
    const double e0 = total_energy(g, p, FunctionalBackend::Pure);
    p.interaction = 1;
    const double e1 = total_energy(g, p, FunctionalBackend::Pure);
    p.interaction = 2.5;
    const double e25 = total_energy(g, p, FunctionalBackend::Pure);
    CHECK_THAT(e25 - e0, WithinAbs(2.5 * (e1 - e0), 1e-7));
  }
}

TEST_CASE("property: the dual is a lower bound that is tight at ground states") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 6;
    DimerParams p;
    p.n_particles = n;
    p.hopping = u(rng);
    p.potential_left = u(rng);
    p.potential_right = u(rng);
    p.interaction = 1;
    const auto gs = ground_state(p);
    if (gs.degenerate || gs.rdm.radius() < 1e-6) continue;
    const double expected = gs.energy - one_particle_energy(gs.rdm, p);
    const auto f = functional_pure_numeric(gs.rdm, n);
    REQUIRE(f.converged);
    CHECK_THAT(f.value, WithinAbs(expected, 1e-7 * n * n));
    const auto dual = functional_ensemble_dual(gs.rdm, n);
    CHECK_THAT(dual.value, WithinAbs(expected, 1e-7 * n * n));

    const auto off = random_point(rng, 0.01);
    CHECK(functional_ensemble_dual(off, n).value <= functional_pure_numeric(off, n).value + 1e-8 * n * n);
  }
}

TEST_CASE("large-N ensemble limit") {
  const int n = 40;
  for (double gll : {0.2, 0.35, 0.6, 0.8}) {
    const OneParticleRdm g(gll, 0.1);
    const double scaled = 2 * functional_ensemble_dual(g, n).value / (n * n) - 1;
    CHECK_THAT(scaled, WithinAbs(functional_ensemble_large_n(g), 0.1));
  }
  CHECK_THAT(functional_ensemble_large_n(OneParticleRdm(1, 0)), WithinAbs(1, 1e-15));
}

TEST_CASE("local search from a good seed") {
  const auto g = OneParticleRdm::from_polar(0.1, 1.0);
  const auto dual = functional_ensemble_dual(g, 4);
  const auto f = constrained_local_search(g, 4, dual.ground_state);
  REQUIRE(f.converged);
  CHECK_THAT(f.value, WithinAbs(functional_pure_numeric(g, 4).value, 1e-8));
}

TEST_CASE("invalid targets are rejected") {
  CHECK_THROWS_AS(functional_pure_numeric(OneParticleRdm(0.5, 0.6), 2), Error);
  CHECK_THROWS_AS(functional_pure_numeric(OneParticleRdm(0.5, 0.2), 0), Error);
}
