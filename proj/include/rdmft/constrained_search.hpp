#pragma once

// Universal functionals of the Hubbard dimer by constrained search over
// N-boson states, in units of the on-site interaction (U = 1). Callers rescale
// linearly by U.

#include <cstdint>
#include <vector>

#include "rdmft/dimer.hpp"

namespace rdmft {

/// <W> = sum_n alpha_n^2 [n(n-1) + (N-n)(N-n-1)].
double interaction_expectation(const ConfigurationVector& state);

struct FunctionalValue {
  double value = 0;
  bool converged = false;
  double residual_ll = 0;  // |gamma_LL(minimizer) - target|
  double residual_lr = 0;
  ConfigurationVector minimizer;
  int converged_starts = 0;
  int total_starts = 0;
};

struct ConstrainedSearchOptions {
  /// Random points on the unit sphere, in addition to the structured seeds.
  int random_starts = 12;
  /// Configuration states around N*gamma_LL and the boundary condensate at the target angle.
  bool structured_seeds = true;
  /// Ground state of the maximizer of the Legendre-Fenchel dual.
  bool dual_seed = true;
  std::uint64_t seed = 0x5eedULL;
  double tolerance = 1e-9;
  std::vector<VectorX<double>> extra_seeds;
};

/// Pure functional F_p^N[gamma] by multistart local constrained minimization.
/// Returns converged == false (NONCONVERGED) when no start meets the tolerance.
FunctionalValue functional_pure_numeric(const OneParticleRdm& target, int n_particles,
                                        const ConstrainedSearchOptions& options = {});

/// One local solve from a given seed. Exposed for warm starts.
FunctionalValue constrained_local_search(const OneParticleRdm& target, int n_particles,
                                         const VectorX<double>& seed, double tolerance = 1e-9);

struct DualResult {
  double value = 0;          // max over one-body potentials of E_0 - N Tr[h gamma]
  double multiplier_ll = 0;  // conjugate potentials (a, b) in H = W - a L - b T
  double multiplier_lr = 0;
  double gradient_norm = 0;  // |gamma(a, b) - target|
  double gap = 0;            // gap of W - a L - b T at the optimum
  VectorX<double> ground_state;
  bool converged = false;
};

/// Ensemble functional evaluated pointwise as the Legendre-Fenchel dual of the
/// ground-state energy. Equals F_e^N (and F_p^N on v-representable points).
DualResult functional_ensemble_dual(const OneParticleRdm& target, int n_particles);

/// Closed-form N = 2 pure functional. Throws CenterSingular at the disc center.
double functional_pure_analytic_n2(const OneParticleRdm& target);

/// N(N-1)(1 - sin^2(phi)/2): value on the disc boundary D = 0.
double functional_boundary_value(int n_particles, double phi);

/// n^2 + (N-n)^2 - N: value at the configuration point gamma_LL = n/N, gamma_LR = 0.
double functional_configuration_value(int n_particles, int n_left);

/// lim_{N->inf} (2/N^2) F_e^N - 1 = 4 (gamma_LL - 1/2)^2.
double functional_ensemble_large_n(const OneParticleRdm& target);

}  // namespace rdmft
