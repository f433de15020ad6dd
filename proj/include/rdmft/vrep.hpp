#pragma once

// v-representability of the dimer 1RDM disc: the N exclusion ellipses of
// degenerate two-configuration superpositions and the boundary.

#include <optional>
#include <string_view>
#include <vector>

#include "rdmft/dimer.hpp"

namespace rdmft {

struct ExclusionEllipse {
  int level = 0;
  int n_particles = 1;
  double center_gamma_ll = 0;  // (2n+1)/(2N)
  double minor_radius = 0;     // 1/(2N), along gamma_LL
  double major_radius = 0;     // sqrt((N-n)(n+1))/(2N), along gamma_LR
  double area = 0;

  /// [N gamma_LL - (n + 1/2)]^2 + N^2 gamma_LR^2 / ((n+1)(N-n)); 1/4 on the curve.
  double level_function(double gamma_ll, double gamma_lr) const;
};

ExclusionEllipse exclusion_ellipse(int level, int n_particles);
std::vector<ExclusionEllipse> exclusion_ellipses(int n_particles);

enum class VRepClass { VRepresentable, EllipseInterior, Boundary, Pole };

struct VRepClassification {
  VRepClass kind = VRepClass::VRepresentable;
  std::optional<int> level;  // set for EllipseInterior

  bool representable() const { return kind == VRepClass::VRepresentable || kind == VRepClass::Pole; }
};

std::string_view to_string(VRepClass kind);
int class_code(VRepClass kind);

inline constexpr double kVRepTolerance = 1e-12;

/// v_L - v_R at which |n, N-n> and |n+1, N-n-1> are degenerate for t = 0.
double degeneracy_potential(int level, int n_particles, double interaction);

VRepClassification classify(const OneParticleRdm& target, int n_particles);

/// Summed ellipse area over the disc area pi/4.
double non_vrep_probability(int n_particles);

}  // namespace rdmft
