#pragma once

// Perturbative construction of the pure functional close to the disc
// boundary D = 0. The unperturbed state is the complete condensate |N> in the
// natural orbital |phi> = alpha|L> + beta|R>, alpha = cos(phi/2),
// beta = sin(phi/2); |phi_perp> = beta|L> - alpha|R>. |k> carries k bosons in
// |phi> and N-k in |phi_perp>.

#include "rdmft/dimer.hpp"

namespace rdmft {

/// <k|(n_L^2 + n_R^2)|N> for k = N, N-1, N-2.
struct WMatrixElements {
  double w0 = 0;
  double w1 = 0;
  double w2 = 0;
};

WMatrixElements matrix_elements_w(double phi, int n_particles);

/// 4 (N-1) alpha^4 beta^4 = W_2^2 / (2N)
double kappa(double phi, int n_particles);

struct BoundaryExpansion {
  double angle_phi = 0;
  int n_particles = 1;
  double interaction = 1;
  double e0 = 0;                // U N(N-1)(1 - sin^2(phi)/2)
  double dcoeff = 0;            // U N(N-2)(3 sin^2(phi) - 2), coefficient of D
  double sqrt_coefficient = 0;  // -U N sqrt(N-1) sin^2(phi), coefficient of sqrt(D)
  double kappa = 0;
  double first_order_energy = 0;  // <N|W|N> = W_0 - N, times U

  double value(double distance) const;
};

BoundaryExpansion boundary_expansion(double phi, int n_particles, double interaction = 1);

/// Validity region of the expansion used by callers and the CLI.
inline constexpr double kBoundaryValidity = 0.05;

/// e0 + e1 D + c sqrt(D)
double functional_boundary(double distance, double phi, int n_particles, double interaction = 1);

/// Leading term of dF/dD, -(U/2) N sqrt(N-1) sin^2(phi) / sqrt(D). Throws
/// Divergent for D < 1e-300.
double bec_force(double distance, double phi, int n_particles, double interaction = 1);

/// sqrt(D / kappa_N(phi)). Throws KappaZero at phi in {0, pi}.
double lambda_of_d(double distance, int n_particles, double phi);

/// Columns are |k>, k = 0..N, in the configuration basis.
MatrixX<double> rotated_fock_basis(double phi, int n_particles);

/// -(W_1 / sqrt(N)) (b_perp^dag b_phi + b_phi^dag b_perp) in the configuration basis.
MatrixX<double> counterterm_h1(double phi, int n_particles);

/// -n_phi + lambda (h1 + W), the auxiliary Hamiltonian whose ground state
/// traces the perturbative curve into the disc.
MatrixX<double> perturbation_hamiltonian(double phi, int n_particles, double lambda);

}  // namespace rdmft
