#include "rdmft/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "rdmft/boundary.hpp"
#include "rdmft/functional_grid.hpp"
#include "rdmft/parallel.hpp"

namespace rdmft {

namespace {

using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kMaxS = std::sqrt(0.5);

double safe_angle(const OneParticleRdm& g) { return g.radius() < 1e-14 ? 0.0 : g.angle(); }

// Energy along the refinement path. For the pure backend the constrained
// search is warm-started from the previous minimizer.
class Evaluator {
 public:
  Evaluator(const DimerParams& params, const EnergyOptions& options, VectorXd warm)
      : params_(params), options_(options), warm_(std::move(warm)) {}

  double operator()(const OneParticleRdm& g) {
    ++evaluations;
    const double f = options_.backend == FunctionalBackend::Pure ? pure(g)
                                                                  : functional_value(options_.backend, g, params_.n_particles, options_.search);
    if (!std::isfinite(f)) return kInf;
    return one_particle_energy(g, params_) + params_.interaction * f;
  }

  const VectorXd& warm() const { return warm_; }
  void set_warm(VectorXd w) { warm_ = std::move(w); }

  int evaluations = 0;
  int failures = 0;

 private:
  double pure(const OneParticleRdm& g) {
    const int n = params_.n_particles;
    if (g.distance() < 1e-12) return functional_boundary_value(n, g.angle());
    FunctionalValue fv;
    if (warm_.size() == n + 1) fv = constrained_local_search(g, n, warm_, options_.search.tolerance);
    if (!fv.converged) {
      const auto dual = functional_ensemble_dual(g, n);
      fv = constrained_local_search(g, n, dual.ground_state, options_.search.tolerance);
    }
    if (!fv.converged) fv = functional_pure_numeric(g, n, options_.search);
    if (!fv.converged) {
      ++failures;
      return kInf;
    }
    warm_ = fv.minimizer.coeffs();
    return fv.value;
  }

  const DimerParams& params_;
  const EnergyOptions& options_;
  VectorXd warm_;
};

// Two charts on the disc: (sqrt(D), phi) resolves the sqrt(D) cusp at the
// boundary, Cartesian (gamma_LL, gamma_LR) avoids the polar singularity at the center.
struct Chart {
  bool polar = true;
  double s_max = kMaxS;

  OneParticleRdm rdm(const Eigen::Vector2d& x) const {
    if (polar) {
      const double s = std::min(std::abs(x(0)), s_max);
      return OneParticleRdm::from_polar(s * s, x(1));
    }
    Eigen::Vector2d c(x(0) - 0.5, x(1));
    const double r = c.norm();
    if (r > 0.5) c *= 0.5 / r;
    return {0.5 + c(0), c(1)};
  }
};

struct Simplex {
  std::array<Eigen::Vector2d, 3> x;
  std::array<double, 3> f;
};

// Nelder-Mead with standard coefficients. Stops on a relative energy spread
// and an absolute simplex size.
Eigen::Vector2d nelder_mead(Evaluator& eval, const Chart& chart, const Eigen::Vector2d& start,
                            const Eigen::Vector2d& step, int max_evals, double& fbest) {
  Simplex sx;
  sx.x = {start, start + Eigen::Vector2d(step(0), 0), start + Eigen::Vector2d(0, step(1))};
  auto f = [&](const Eigen::Vector2d& x) { return eval(chart.rdm(x)); };
  for (int i = 0; i < 3; ++i) sx.f[i] = f(sx.x[i]);
  const int start_evals = eval.evaluations;
  while (eval.evaluations - start_evals < max_evals) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return sx.f[a] < sx.f[b]; });
    Simplex s2;
    for (int i = 0; i < 3; ++i) {
      s2.x[i] = sx.x[idx[i]];
      s2.f[i] = sx.f[idx[i]];
    }
    sx = s2;
    const double spread = std::abs(sx.f[2] - sx.f[0]);
    const double size = std::max((sx.x[1] - sx.x[0]).norm(), (sx.x[2] - sx.x[0]).norm());
    if (spread <= 1e-14 * std::max(1.0, std::abs(sx.f[0])) && size < 1e-7) break;
    if (size < 1e-13) break;

    const Eigen::Vector2d centroid = 0.5 * (sx.x[0] + sx.x[1]);
    const Eigen::Vector2d xr = centroid + (centroid - sx.x[2]);
    const double fr = f(xr);
    if (fr < sx.f[0]) {
      const Eigen::Vector2d xe = centroid + 2.0 * (centroid - sx.x[2]);
      const double fe = f(xe);
      if (fe < fr) {
        sx.x[2] = xe;
        sx.f[2] = fe;
      } else {
        sx.x[2] = xr;
        sx.f[2] = fr;
      }
      continue;
    }
    if (fr < sx.f[1]) {
      sx.x[2] = xr;
      sx.f[2] = fr;
      continue;
    }
    const bool outside = fr < sx.f[2];
    const Eigen::Vector2d xc = outside ? centroid + 0.5 * (xr - centroid) : centroid + 0.5 * (sx.x[2] - centroid);
    const double fc = f(xc);
    if (fc < std::min(fr, sx.f[2])) {
      sx.x[2] = xc;
      sx.f[2] = fc;
      continue;
    }
    for (int i = 1; i < 3; ++i) {
      sx.x[i] = sx.x[0] + 0.5 * (sx.x[i] - sx.x[0]);
      sx.f[i] = f(sx.x[i]);
    }
  }
  const int best = static_cast<int>(std::min_element(sx.f.begin(), sx.f.end()) - sx.f.begin());
  fbest = sx.f[best];
  return sx.x[best];
}

struct Candidate {
  OneParticleRdm rdm;
  double energy = kInf;
  int evaluations = 0;
  int failures = 0;
};

Candidate refine(const DimerParams& params, const EnergyOptions& options, const ScanTable& table,
                 const ScanTable::Point& start) {
  Chart chart;
  if (options.backend == FunctionalBackend::Boundary) chart.s_max = std::sqrt(kBoundaryValidity);
  const double ds = chart.s_max / std::max(1, table.n_radial - 1);
  const double dphi = 2 * std::numbers::pi / table.n_angular;

  Evaluator eval(params, options, start.minimizer);
  Candidate c;
  Eigen::Vector2d x;
  Eigen::Vector2d step;
  chart.polar = start.s * start.s <= 0.25;
  if (chart.polar) {
    x = {start.s, start.phi};
    step = {0.5 * ds, 0.5 * dphi};
  } else {
    x = {start.rdm.gamma_ll(), start.rdm.gamma_lr()};
    step = {0.02, 0.02};
  }

  // The warm-started branch can miss a lower branch of the functional; a full
  // search at the refined point detects that and restarts from there.
  for (int round = 0; round < 3; ++round) {
    double f = kInf;
    x = nelder_mead(eval, chart, x, step, 800, f);
    const OneParticleRdm g = chart.rdm(x);
    c.rdm = g;
    c.energy = f;
    if (options.backend != FunctionalBackend::Pure || g.distance() < 1e-12) break;
    const FunctionalValue full = functional_pure_numeric(g, params.n_particles, options.search);
    const double e_full = one_particle_energy(g, params) + params.interaction * full.value;
    if (!full.converged || e_full >= f - 1e-12 * std::max(1.0, std::abs(f))) break;
    eval.set_warm(full.minimizer.coeffs());
    c.energy = e_full;
    step *= 0.25;
  }
  c.evaluations = eval.evaluations;
  c.failures = eval.failures;
  return c;
}

// Grid-local minima of the scan energy, lowest first.
std::vector<int> basins(const ScanTable& table, const std::vector<double>& energy, int count) {
  const int nr = table.n_radial, na = table.n_angular;
  const bool has_center = static_cast<int>(table.points.size()) > nr * na;
  std::vector<int> out;
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < na; ++j) {
      const int k = i * na + j;
      const double e = energy[k];
      if (!std::isfinite(e)) continue;
      bool local = true;
      for (int di = -1; di <= 1 && local; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di;
          if (ii < 0) continue;
          const int kk = ii >= nr ? (has_center ? nr * na : -1) : ii * na + (j + dj + na) % na;
          if (kk >= 0 && energy[kk] < e) {
            local = false;
            break;
          }
        }
      }
      if (local) out.push_back(k);
    }
  }
  if (has_center) {
    const int kc = nr * na;
    bool local = std::isfinite(energy[kc]);
    for (int j = 0; j < na && local; ++j) local = energy[(nr - 1) * na + j] >= energy[kc];
    if (local) out.push_back(kc);
  }
  std::stable_sort(out.begin(), out.end(), [&](int a, int b) { return energy[a] < energy[b]; });
  if (static_cast<int>(out.size()) > count) out.resize(count);
  return out;
}

}  // namespace

std::string_view to_string(FunctionalBackend backend) {
  switch (backend) {
    case FunctionalBackend::Pure: return "pure";
    case FunctionalBackend::Ensemble: return "ensemble";
    case FunctionalBackend::Boundary: return "boundary";
    case FunctionalBackend::Analytic: return "analytic";
  }
  return "unknown";
}

FunctionalBackend backend_from_string(std::string_view name) {
  for (auto b : {FunctionalBackend::Pure, FunctionalBackend::Ensemble, FunctionalBackend::Boundary,
                 FunctionalBackend::Analytic})
    if (to_string(b) == name) return b;
  throw Error(ErrorCode::InvalidArgument, "unknown functional backend '" + std::string(name) + "'");
}

double functional_value(FunctionalBackend backend, const OneParticleRdm& target, int n_particles,
                        const ConstrainedSearchOptions& options) {
  switch (backend) {
    case FunctionalBackend::Pure: {
      const FunctionalValue fv = functional_pure_numeric(target, n_particles, options);
      if (!fv.converged) throw Error(ErrorCode::NonConverged, "constrained search did not converge");
      return fv.value;
    }
    case FunctionalBackend::Ensemble:
      // boundary points are extreme points of the disc, where F_e = F_p
      if (target.distance() < 1e-12) return functional_boundary_value(n_particles, target.angle());
      return functional_ensemble_dual(target, n_particles).value;
    case FunctionalBackend::Boundary:
      if (target.distance() > kBoundaryValidity) return kInf;
      return functional_boundary(target.distance(), safe_angle(target), n_particles);
    case FunctionalBackend::Analytic:
      if (n_particles != 2) throw Error(ErrorCode::InvalidArgument, "analytic backend requires N = 2");
      // the constrained-search minimum at the center is 0
      if (target.radius() < 1e-14) return 0.0;
      return functional_pure_analytic_n2(target);
  }
  return kInf;
}

double one_particle_energy(const OneParticleRdm& target, const DimerParams& params) {
  return params.n_particles * (params.potential_left * target.gamma_ll() +
                               params.potential_right * target.gamma_rr() -
                               2 * params.hopping * target.gamma_lr());
}

double total_energy(const OneParticleRdm& target, const DimerParams& params, FunctionalBackend backend,
                    const ConstrainedSearchOptions& options) {
  params.validate();
  if (!target.in_disc()) throw Error(ErrorCode::InvalidArgument, "target outside the 1RDM disc");
  return one_particle_energy(target, params) +
         params.interaction * functional_value(backend, target, params.n_particles, options);
}

ScanTable make_scan_table(int n_particles, const EnergyOptions& options) {
  if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "n_particles must be >= 1");
  if (options.n_radial < 2 || options.n_angular < 2)
    throw Error(ErrorCode::InvalidArgument, "scan resolution must be >= 2 in each dimension");
  ScanTable table;
  table.n_particles = n_particles;
  table.backend = options.backend;
  table.n_radial = options.n_radial;
  table.n_angular = options.n_angular;
  const bool boundary = options.backend == FunctionalBackend::Boundary;
  const double s_max = boundary ? std::sqrt(kBoundaryValidity) : std::sqrt(kGridMaxDistance);
  for (int i = 0; i < options.n_radial; ++i) {
    const double s = s_max * i / (options.n_radial - 1);
    for (int j = 0; j < options.n_angular; ++j) {
      const double phi = 2 * std::numbers::pi * j / options.n_angular;
      table.points.push_back({s, phi, OneParticleRdm::from_polar(s * s, phi), 0.0, true, {}});
    }
  }
  if (!boundary) table.points.push_back({kMaxS, 0.0, OneParticleRdm(0.5, 0.0), 0.0, true, {}});

  parallel_for(table.points.size(), options.workers, [&](std::size_t k) {
    auto& p = table.points[k];
    if (options.backend == FunctionalBackend::Pure) {
      ConstrainedSearchOptions local = options.search;
      local.seed = mix_seed(options.search.seed, k);
      const FunctionalValue fv = functional_pure_numeric(p.rdm, n_particles, local);
      p.value = fv.value;
      p.converged = fv.converged;
      p.minimizer = fv.minimizer.coeffs();
    } else {
      p.value = functional_value(options.backend, p.rdm, n_particles, options.search);
    }
  });
  return table;
}

EnergyMinimizationResult minimize_energy(const DimerParams& params, const EnergyOptions& options) {
  params.validate();
  if (params.interaction == 0) {
    // no functional contribution: the minimum is the condensate in the lowest orbital
    return minimize_energy(params, ScanTable{params.n_particles, options.backend, 0, 0, {}}, options);
  }
  return minimize_energy(params, make_scan_table(params.n_particles, options), options);
}

EnergyMinimizationResult minimize_energy(const DimerParams& params, const ScanTable& table,
                                         const EnergyOptions& options) {
  params.validate();
  if (table.n_particles != params.n_particles)
    throw Error(ErrorCode::InvalidArgument, "scan table was built for a different N");
  EnergyOptions opts = options;
  opts.backend = table.backend;

  EnergyMinimizationResult res;
  if (params.interaction == 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(one_particle_hamiltonian(params));
    const Eigen::Vector2d u = es.eigenvectors().col(0);
    res.minimizer = OneParticleRdm(u(0) * u(0), u(0) * u(1));
    res.energy = params.n_particles * es.eigenvalues()(0);
    res.scan_minimum = res.energy;
  } else {
    if (table.points.empty()) throw Error(ErrorCode::InvalidArgument, "empty scan table");
    std::vector<double> energy(table.points.size());
    for (std::size_t k = 0; k < table.points.size(); ++k) {
      const auto& p = table.points[k];
      energy[k] = p.converged && std::isfinite(p.value)
                      ? one_particle_energy(p.rdm, params) + params.interaction * p.value
                      : kInf;
    }
    const auto starts = basins(table, energy, opts.basins);
    if (starts.empty()) throw Error(ErrorCode::NonConverged, "no finite scan energies");
    res.scan_minimum = energy[starts.front()];

    std::vector<Candidate> refined(starts.size());
    EnergyOptions inner = opts;
    inner.workers = 1;
    parallel_for(starts.size(), opts.workers,
                 [&](std::size_t b) { refined[b] = refine(params, inner, table, table.points[starts[b]]); });

    Candidate best;
    best.rdm = table.points[starts.front()].rdm;
    best.energy = res.scan_minimum;
    int failures = 0;
    for (const auto& c : refined) {
      res.evaluations += c.evaluations;
      failures += c.failures;
      if (c.energy < best.energy) best = c;
    }
    res.minimizer = best.rdm;
    res.energy = best.energy;
    if (failures > 0)
      res.warnings.push_back(std::to_string(failures) + " functional evaluations did not converge");
    res.converged = std::isfinite(res.energy);
  }

  // the free condensate sits on the rim; rounding in gamma must not move it inside or out
  res.d0 = params.interaction == 0 ? 0.0 : std::max(0.0, res.minimizer.distance());
  res.phi0 = safe_angle(res.minimizer);
  res.n_bec = params.n_particles * (1 - res.d0);
  if (params.interaction > 0 && res.d0 <= kPinnedDistance) {
    res.boundary_pinned = true;
    res.warnings.push_back("BOUNDARY_PINNED: minimizer on the disc boundary at U > 0");
  }

  if (opts.compare_ed) {
    const GroundStateResult gs = ground_state(params);
    EdComparison cmp;
    cmp.energy = gs.energy;
    cmp.rdm = gs.rdm;
    cmp.distance = gs.rdm.distance();
    cmp.angle = safe_angle(gs.rdm);
    cmp.degenerate = gs.degenerate;
    cmp.energy_error = res.energy - gs.energy;
    cmp.rdm_distance = res.minimizer.frobenius_distance(gs.rdm);
    if (gs.degenerate) res.warnings.push_back("DEGENERATE: exact ground state is degenerate");
    res.comparison = cmp;
  }
  return res;
}

double n_bec_prediction(const DimerParams& params, double phi0) {
  params.validate();
  if (params.hopping == 0) throw Error(ErrorCode::DivisionByZero, "u = U/t requires t != 0");
  const double u = params.interaction / params.hopping;
  const double dv = params.reduced_asymmetry();
  const double s = std::sin(phi0);
  const double den = s - dv * std::cos(phi0);
  if (std::abs(den) < 1e-15) throw Error(ErrorCode::DivisionByZero, "sin(phi0) = dv cos(phi0)");
  const double n = params.n_particles;
  return n * (1 - (n - 1) * s * s * s * s * u * u / (16 * den * den));
}

bool n_bec_prediction_valid(const DimerParams& params) {
  if (params.hopping == 0) return false;
  return std::abs(params.interaction / params.hopping) * std::sqrt(params.n_particles - 1.0) < 0.3;
}

}  // namespace rdmft
