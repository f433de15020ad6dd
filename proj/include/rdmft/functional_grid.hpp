#pragma once

// Functional values sampled on a polar (D, phi) grid over the 1RDM disc.

#include <string>
#include <string_view>
#include <vector>

#include "rdmft/constrained_search.hpp"

namespace rdmft {

enum class FunctionalKind { Pure, Ensemble, Analytic };
enum class SampleStatus { Ok, NonConverged, Singular, Missing };

std::string_view to_string(FunctionalKind kind);
std::string_view to_string(SampleStatus status);

/// D never reaches 1/2 on the grid; the center is a separate sample.
inline constexpr double kGridMaxDistance = 0.5 - 1e-6;

struct GridSpec {
  int n_particles = 2;
  int n_radial = 50;
  int n_angular = 50;
  double d_min = 0;
  double d_max = 0.5;
  bool include_center = false;

  void validate() const;
  /// n_radial values from d_min to min(d_max, kGridMaxDistance), inclusive.
  std::vector<double> distances() const;
  /// 2 pi j / n_angular
  std::vector<double> angles() const;
};

struct GridSample {
  double gamma_ll = 0;
  double gamma_lr = 0;
  double d = 0;
  double phi = 0;
  double value = 0;
  SampleStatus status = SampleStatus::Ok;
};

struct FunctionalGrid {
  GridSpec spec;
  FunctionalKind kind = FunctionalKind::Pure;
  std::vector<GridSample> samples;  // row-major in (D, phi), then the center if requested
  std::string created;              // UTC, ISO 8601

  int count(SampleStatus status) const;
  /// Extremes over Ok samples, used to map a surface onto [0, 1].
  double min_value() const;
  double max_value() const;
};

/// Sample positions only, values zero and status Ok.
FunctionalGrid make_grid(const GridSpec& spec, FunctionalKind kind);

FunctionalGrid pure_grid(const GridSpec& spec, const ConstrainedSearchOptions& options = {},
                         int workers = 1);

/// N = 2 closed form; the center sample is reported Singular.
FunctionalGrid analytic_grid(const GridSpec& spec);

/// Lower convex envelope of the Ok samples of a pure grid, evaluated back on
/// the same points. Samples missing upstream stay Missing.
FunctionalGrid functional_ensemble(const FunctionalGrid& pure);

/// Pointwise Legendre-Fenchel dual, an independent route to the same surface.
FunctionalGrid dual_ensemble_grid(const GridSpec& spec, int workers = 1);

}  // namespace rdmft
