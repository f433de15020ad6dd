#pragma once

// Minimization of E_h[gamma] = N Tr[h gamma] + U F[gamma] over the 1RDM disc
// (unit-trace gamma, explicit factor N on the one-particle part).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdmft/constrained_search.hpp"

namespace rdmft {

enum class FunctionalBackend {
  Pure,      // constrained search
  Ensemble,  // pointwise Legendre-Fenchel dual
  Boundary,  // small-D expansion, D <= kBoundaryValidity
  Analytic,  // N = 2 closed form
};

std::string_view to_string(FunctionalBackend backend);
FunctionalBackend backend_from_string(std::string_view name);

/// F[gamma] at U = 1 for the given backend.
double functional_value(FunctionalBackend backend, const OneParticleRdm& target, int n_particles,
                        const ConstrainedSearchOptions& options = {});

/// N [v_L gamma_LL + v_R (1 - gamma_LL) - 2 t gamma_LR]
double one_particle_energy(const OneParticleRdm& target, const DimerParams& params);

double total_energy(const OneParticleRdm& target, const DimerParams& params, FunctionalBackend backend,
                    const ConstrainedSearchOptions& options = {});

/// Functional values on a polar grid uniform in sqrt(D), reusable across
/// Hamiltonians with the same N.
struct ScanTable {
  struct Point {
    double s = 0;  // sqrt(D)
    double phi = 0;
    OneParticleRdm rdm;
    double value = 0;  // F at U = 1
    bool converged = true;
    VectorX<double> minimizer;  // empty unless the backend is Pure
  };

  int n_particles = 0;
  FunctionalBackend backend = FunctionalBackend::Pure;
  int n_radial = 0;
  int n_angular = 0;
  std::vector<Point> points;  // row-major (s, phi), then the center
};

struct EnergyOptions {
  FunctionalBackend backend = FunctionalBackend::Pure;
  int n_radial = 16;
  int n_angular = 32;
  int basins = 4;
  bool compare_ed = true;
  ConstrainedSearchOptions search;
  int workers = 1;
};

ScanTable make_scan_table(int n_particles, const EnergyOptions& options);

struct EdComparison {
  double energy = 0;
  OneParticleRdm rdm;
  double distance = 0;
  double angle = 0;
  bool degenerate = false;
  double energy_error = 0;  // E_functional - E_ED
  double rdm_distance = 0;  // Frobenius
};

struct EnergyMinimizationResult {
  double energy = 0;
  OneParticleRdm minimizer;
  double d0 = 0;
  double phi0 = 0;
  double n_bec = 0;  // N (1 - D_0)
  bool converged = true;
  bool boundary_pinned = false;  // D_0 <= kPinnedDistance at U > 0
  int evaluations = 0;
  double scan_minimum = 0;  // lowest energy over the scan table
  std::optional<EdComparison> comparison;
  std::vector<std::string> warnings;
};

inline constexpr double kPinnedDistance = 1e-12;

EnergyMinimizationResult minimize_energy(const DimerParams& params, const EnergyOptions& options = {});

/// Reuses a precomputed table; the table's N and backend override the options.
EnergyMinimizationResult minimize_energy(const DimerParams& params, const ScanTable& table,
                                         const EnergyOptions& options = {});

/// N [1 - (N-1) sin^4(phi0) u^2 / (16 (sin(phi0) - dv cos(phi0))^2)], u = U/t,
/// dv = (v_L - v_R)/(2t).
double n_bec_prediction(const DimerParams& params, double phi0);

/// u sqrt(N-1) < 0.3, the regime where the prediction is meaningful.
bool n_bec_prediction_valid(const DimerParams& params);

}  // namespace rdmft
