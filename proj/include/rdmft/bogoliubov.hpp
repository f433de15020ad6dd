#pragma once

// Per-mode functional of the homogeneous dilute Bose gas in the Bogoliubov
// approximation. nw0 is the product n W_0 of density and the zeroth Fourier
// coefficient of the pair interaction; eps is the kinetic energy of a mode.

#include <span>
#include <vector>

namespace rdmft {

struct GasParams {
  double density = 1;    // n = N / L^3
  double w0 = 1;         // W_0
  double n_particles = 1;
  std::vector<double> occupations;  // n_p >= 0, one per mode p != 0

  double nw0() const { return density * w0; }
  void validate() const;
};

/// (1/2)[sqrt(eps^2 + 2 nW_0 eps) - (eps + nW_0)]
double mode_energy(double eps, double nw0);

/// (nW_0/2)[(2 n_p + 1)/sqrt(n_p (n_p + 1)) - 2]. Throws ZeroOccupation for n_p <= 0.
double epsilon_of_occupation(double np, double nw0);

/// Inverse of epsilon_of_occupation by bracketed bisection in log(n_p).
double occupation_of_epsilon(double eps, double nw0);

/// -nW_0 [sqrt(n_p (n_p + 1)) - n_p]
double functional_mode(double np, double nw0);

/// Sum of functional_mode over the modes.
double functional_modes(std::span<const double> occupations, double nw0);

struct LegendreFenchelCheck {
  double lhs = 0;  // mode_energy(eps)
  double rhs = 0;  // min_{n_p >= 0} eps n_p + functional_mode(n_p)
  double gap = 0;
  double minimizer = 0;
};

LegendreFenchelCheck legendre_fenchel_check(double eps, double nw0);

/// dF/dD along n_p = N D w_p. Throws Divergent at D <= 0.
double homogeneous_bec_force(const GasParams& params, std::span<const double> weights, double distance);

/// -(nW_0/2) sum_p sqrt(N w_p) / sqrt(D)
double homogeneous_bec_force_leading(const GasParams& params, std::span<const double> weights,
                                     double distance);

}  // namespace rdmft
