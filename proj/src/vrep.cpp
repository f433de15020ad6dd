#include "rdmft/vrep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rdmft {

double ExclusionEllipse::level_function(double gamma_ll, double gamma_lr) const {
  const double n = n_particles;
  const double x = n * gamma_ll - (level + 0.5);
  return x * x + n * n * gamma_lr * gamma_lr / ((level + 1.0) * (n_particles - level));
}

ExclusionEllipse exclusion_ellipse(int level, int n_particles) {
  if (n_particles < 1 || level < 0 || level >= n_particles)
    throw Error(ErrorCode::InvalidArgument, "ellipse level must lie in [0, N-1]");
  const double n = n_particles;
  const double w = std::sqrt((n - level) * (level + 1.0));
  ExclusionEllipse e;
  e.level = level;
  e.n_particles = n_particles;
  e.center_gamma_ll = (2.0 * level + 1.0) / (2.0 * n);
  e.minor_radius = 1.0 / (2.0 * n);
  e.major_radius = w / (2.0 * n);
  e.area = std::numbers::pi * w / (4.0 * n * n);
  return e;
}

std::vector<ExclusionEllipse> exclusion_ellipses(int n_particles) {
  std::vector<ExclusionEllipse> out;
  for (int n = 0; n < n_particles; ++n) out.push_back(exclusion_ellipse(n, n_particles));
  return out;
}

std::string_view to_string(VRepClass kind) {
  switch (kind) {
    case VRepClass::VRepresentable: return "V_REPRESENTABLE";
    case VRepClass::EllipseInterior: return "NON_VREP_ELLIPSE_INTERIOR";
    case VRepClass::Boundary: return "NON_VREP_BOUNDARY";
    case VRepClass::Pole: return "POLE";
  }
  return "UNKNOWN";
}

int class_code(VRepClass kind) {
  switch (kind) {
    case VRepClass::VRepresentable: return 0;
    case VRepClass::EllipseInterior: return 1;
    case VRepClass::Boundary: return 2;
    case VRepClass::Pole: return 3;
  }
  return -1;
}

double degeneracy_potential(int level, int n_particles, double interaction) {
  if (level < 0 || level > n_particles - 1)
    throw Error(ErrorCode::InvalidArgument, "level must lie in [0, N-1]");
  return 2.0 * interaction * (n_particles - 1 - 2 * level);
}

VRepClassification classify(const OneParticleRdm& target, int n_particles) {
  if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "n_particles must be >= 1");
  if (target.distance() < kVRepTolerance) {
    const double phi = target.angle();
    const double pi = std::numbers::pi;
    if (std::min({phi, std::abs(phi - pi), 2 * pi - phi}) < kVRepTolerance)
      return {VRepClass::Pole, std::nullopt};
    return {VRepClass::Boundary, std::nullopt};
  }
  const double n = n_particles;
  const int guess = static_cast<int>(std::floor(n * target.gamma_ll()));
  for (int level = std::max(0, guess - 1); level <= std::min(n_particles - 1, guess + 1); ++level) {
    if (exclusion_ellipse(level, n_particles).level_function(target.gamma_ll(), target.gamma_lr()) <
        0.25 - kVRepTolerance)
      return {VRepClass::EllipseInterior, level};
  }
  return {VRepClass::VRepresentable, std::nullopt};
}

double non_vrep_probability(int n_particles) {
  if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "n_particles must be >= 1");
  const double n = n_particles;
  double sum = 0;
  for (int k = 0; k < n_particles; ++k) sum += std::sqrt((n - k) * (k + 1.0));
  return sum / (n * n);
}

}  // namespace rdmft
