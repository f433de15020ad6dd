#include "rdmft/functional_grid.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <limits>
#include <numbers>

#include "rdmft/convex_envelope.hpp"
#include "rdmft/parallel.hpp"

namespace rdmft {

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::Pure: return "pure";
    case FunctionalKind::Ensemble: return "ensemble";
    case FunctionalKind::Analytic: return "analytic";
  }
  return "unknown";
}

std::string_view to_string(SampleStatus status) {
  switch (status) {
    case SampleStatus::Ok: return "ok";
    case SampleStatus::NonConverged: return "nonconverged";
    case SampleStatus::Singular: return "singular";
    case SampleStatus::Missing: return "missing";
  }
  return "unknown";
}

void GridSpec::validate() const {
  if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "n_particles must be >= 1");
  if (n_radial < 2 || n_angular < 2)
    throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 2 in each dimension");
  if (!(d_min >= 0) || !(d_max <= 0.5) || !(d_min < d_max))
    throw Error(ErrorCode::InvalidArgument, "D-range must satisfy 0 <= d_min < d_max <= 1/2");
}

std::vector<double> GridSpec::distances() const {
  const double hi = std::min(d_max, kGridMaxDistance);
  std::vector<double> d(n_radial);
  for (int i = 0; i < n_radial; ++i) d[i] = d_min + (hi - d_min) * i / (n_radial - 1);
  d.back() = hi;
  return d;
}

std::vector<double> GridSpec::angles() const {
  std::vector<double> phi(n_angular);
  for (int j = 0; j < n_angular; ++j) phi[j] = 2 * std::numbers::pi * j / n_angular;
  return phi;
}

int FunctionalGrid::count(SampleStatus status) const {
  return static_cast<int>(std::count_if(samples.begin(), samples.end(),
                                        [&](const GridSample& s) { return s.status == status; }));
}

double FunctionalGrid::min_value() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    if (s.status == SampleStatus::Ok) v = std::min(v, s.value);
  return v;
}

double FunctionalGrid::max_value() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples)
    if (s.status == SampleStatus::Ok) v = std::max(v, s.value);
  return v;
}

FunctionalGrid make_grid(const GridSpec& spec, FunctionalKind kind) {
  spec.validate();
  FunctionalGrid grid;
  grid.spec = spec;
  grid.kind = kind;
  grid.created = utc_now();
  const auto ds = spec.distances();
  const auto phis = spec.angles();
  grid.samples.reserve(ds.size() * phis.size() + 1);
  for (double d : ds) {
    for (double phi : phis) {
      const auto g = cartesian_from_polar(d, phi);
      grid.samples.push_back({g(0), g(1), d, phi, 0.0, SampleStatus::Ok});
    }
  }
  if (spec.include_center) grid.samples.push_back({0.5, 0.0, 0.5, 0.0, 0.0, SampleStatus::Ok});
  return grid;
}

FunctionalGrid pure_grid(const GridSpec& spec, const ConstrainedSearchOptions& options, int workers) {
  FunctionalGrid grid = make_grid(spec, FunctionalKind::Pure);
  parallel_for(grid.samples.size(), workers, [&](std::size_t i) {
    GridSample& s = grid.samples[i];
    ConstrainedSearchOptions local = options;
    local.seed = mix_seed(options.seed, i);
    const FunctionalValue fv =
        functional_pure_numeric(OneParticleRdm(s.gamma_ll, s.gamma_lr), spec.n_particles, local);
    s.value = fv.value;
    s.status = fv.converged ? SampleStatus::Ok : SampleStatus::NonConverged;
  });
  return grid;
}

FunctionalGrid analytic_grid(const GridSpec& spec) {
  if (spec.n_particles != 2)
    throw Error(ErrorCode::InvalidArgument, "the closed-form functional exists for N = 2 only");
  FunctionalGrid grid = make_grid(spec, FunctionalKind::Analytic);
  for (auto& s : grid.samples) {
    try {
      s.value = functional_pure_analytic_n2(OneParticleRdm(s.gamma_ll, s.gamma_lr));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CenterSingular) throw;
      s.status = SampleStatus::Singular;
    }
  }
  return grid;
}

FunctionalGrid functional_ensemble(const FunctionalGrid& pure) {
  FunctionalGrid out = pure;
  out.kind = FunctionalKind::Ensemble;
  out.created = utc_now();
  std::vector<Eigen::Vector3d> cloud;
  for (const auto& s : pure.samples)
    if (s.status == SampleStatus::Ok) cloud.emplace_back(s.gamma_ll, s.gamma_lr, s.value);
  const LowerConvexEnvelope envelope(cloud);
  for (auto& s : out.samples) {
    if (s.status != SampleStatus::Ok) {
      s.status = SampleStatus::Missing;
      continue;
    }
    // the sample itself is a hull input, so the envelope cannot exceed it
    const auto v = envelope.evaluate(s.gamma_ll, s.gamma_lr);
    s.value = v ? std::min(*v, s.value) : s.value;
  }
  return out;
}

FunctionalGrid dual_ensemble_grid(const GridSpec& spec, int workers) {
  FunctionalGrid grid = make_grid(spec, FunctionalKind::Ensemble);
  parallel_for(grid.samples.size(), workers, [&](std::size_t i) {
    GridSample& s = grid.samples[i];
    // on the rim the supremum is only approached as the potentials diverge
    if (s.d < 1e-12) {
      s.value = functional_boundary_value(spec.n_particles, s.phi);
      return;
    }
    const DualResult r = functional_ensemble_dual(OneParticleRdm(s.gamma_ll, s.gamma_lr), spec.n_particles);
    s.value = r.value;
    s.status = r.converged ? SampleStatus::Ok : SampleStatus::NonConverged;
  });
  return grid;
}

}  // namespace rdmft
