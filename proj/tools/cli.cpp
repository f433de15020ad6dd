#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <utility>

#include "rdmft/bogoliubov.hpp"
#include "rdmft/boundary.hpp"
#include "rdmft/energy.hpp"
#include "rdmft/functional_grid.hpp"
#include "rdmft/parallel.hpp"
#include "rdmft/vrep.hpp"

namespace rdmft::cli {

namespace {

using json = nlohmann::ordered_json;

struct Output {
  std::ostream& os;
  bool csv;
};

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i)
    v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / std::max(1, count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

DimerParams dimer_params(const RunConfig& c) {
  DimerParams p;
  p.n_particles = c.n;
  p.hopping = c.t;
  p.potential_left = c.vl;
  p.potential_right = c.vr;
  p.interaction = c.u;
  p.validate();
  return p;
}

json params_json(const RunConfig& c) {
  return {{"n", c.n}, {"u", c.u}, {"t", c.t}, {"vl", c.vl}, {"vr", c.vr}};
}

json header(const RunConfig& c) {
  return {{"schema_version", 1}, {"subcommand", c.subcommand}, {"params", params_json(c)}, {"seed", c.seed}};
}

void check_range(double lo, double hi, bool open_zero) {
  if (!(lo >= 0) || !(hi <= 0.5) || !(lo < hi) || (open_zero && !(lo > 0)))
    throw Error(ErrorCode::InvalidArgument, "D-range must satisfy 0 <= d_min < d_max <= 1/2");
}

// --- functional-grid -------------------------------------------------------

int functional_grid(const RunConfig& c, Output out, std::ostream& err) {
  const auto [nd, np] = parse_grid(c.grid.value_or("50x50"));
  GridSpec spec;
  spec.n_particles = c.n;
  spec.n_radial = nd;
  spec.n_angular = np;
  spec.d_min = c.d_min.value_or(0.0);
  spec.d_max = c.d_max.value_or(0.5);
  spec.include_center = spec.d_max >= kGridMaxDistance;
  spec.validate();
  if (!(c.u >= 0)) throw Error(ErrorCode::InvalidArgument, "U must be >= 0");

  const std::string which = c.functional.value_or("all");
  if (which != "all" && which != "pure" && which != "ensemble" && which != "analytic")
    throw Error(ErrorCode::InvalidArgument, "--functional must be pure, ensemble, analytic or all");
  const bool want_pure = which == "all" || which == "pure" || which == "ensemble";
  const bool want_analytic = (which == "all" && c.n == 2) || which == "analytic";

  ConstrainedSearchOptions options;
  options.seed = c.seed;
  std::vector<FunctionalGrid> grids;
  int nonconverged = 0;
  if (want_pure) {
    FunctionalGrid pure = pure_grid(spec, options, c.workers);
    nonconverged = pure.count(SampleStatus::NonConverged);
    FunctionalGrid ens = functional_ensemble(pure);
    if (which != "ensemble") grids.push_back(std::move(pure));
    if (which != "pure") grids.push_back(std::move(ens));
  }
  if (want_analytic) grids.push_back(analytic_grid(spec));
  for (auto& g : grids)
    for (auto& s : g.samples) s.value *= c.u;

  const auto& base = grids.front().samples;
  if (out.csv) {
    CsvWriter w(out.os);
    std::vector<std::string> head{"gamma_ll", "gamma_lr", "d", "phi"};
    if (grids.size() == 1) {
      head.insert(head.end(), {"value", "status"});
    } else {
      for (const auto& g : grids) {
        head.push_back(std::string(to_string(g.kind)));
        head.push_back(std::string(to_string(g.kind)) + "_status");
      }
    }
    w.row(head);
    for (std::size_t i = 0; i < base.size(); ++i) {
      std::vector<std::string> row{format_double(base[i].gamma_ll), format_double(base[i].gamma_lr),
                                   format_double(base[i].d), format_double(base[i].phi)};
      for (const auto& g : grids) {
        row.push_back(format_double(g.samples[i].value));
        row.push_back(std::string(to_string(g.samples[i].status)));
      }
      w.row(row);
    }
  } else {
    json j = header(c);
    j["n_particles"] = c.n;
    j["resolution"] = {{"n_radial", nd}, {"n_angular", np}};
    j["d_range"] = {spec.distances().front(), spec.distances().back()};
    j["center_sample"] = spec.include_center;
    j["units"] = "functional values in units of U, scaled by the given U";
    j["created"] = grids.front().created;
    json pts = {{"gamma_ll", json::array()}, {"gamma_lr", json::array()}, {"d", json::array()}, {"phi", json::array()}};
    for (const auto& s : base) {
      pts["gamma_ll"].push_back(s.gamma_ll);
      pts["gamma_lr"].push_back(s.gamma_lr);
      pts["d"].push_back(s.d);
      pts["phi"].push_back(s.phi);
    }
    j["points"] = pts;
    json fs = json::object();
    for (const auto& g : grids) {
      json values = json::array(), status = json::array();
      for (const auto& s : g.samples) {
        values.push_back(s.status == SampleStatus::Ok ? number(s.value) : json(nullptr));
        status.push_back(std::string(to_string(s.status)));
      }
      fs[std::string(to_string(g.kind))] = {
          {"values", values},
          {"status", status},
          {"renormalization", {{"min", number(g.min_value())}, {"max", number(g.max_value())}}}};
    }
    j["functionals"] = fs;
    out.os << j.dump(2) << "\n";
  }

  if (nonconverged * 100 > static_cast<int>(base.size())) {
    err << "error: " << nonconverged << " of " << base.size()
        << " cells did not converge (NONCONVERGED above 1% of the grid)\n";
    return kNonConverged;
  }
  return kSuccess;
}

// --- vrep-map --------------------------------------------------------------

int vrep_map(const RunConfig& c, Output out, std::ostream&) {
  const auto [nd, np] = parse_grid(c.grid.value_or("50x50"));
  GridSpec spec;
  spec.n_particles = c.n;
  spec.n_radial = nd;
  spec.n_angular = np;
  spec.d_min = c.d_min.value_or(0.0);
  spec.d_max = c.d_max.value_or(0.5);
  spec.include_center = spec.d_max >= kGridMaxDistance;
  const FunctionalGrid grid = make_grid(spec, FunctionalKind::Pure);

  std::vector<VRepClassification> cls;
  for (const auto& s : grid.samples) cls.push_back(classify(OneParticleRdm(s.gamma_ll, s.gamma_lr), c.n));

  if (out.csv) {
    CsvWriter w(out.os);
    w.row({"gamma_ll", "gamma_lr", "d", "phi", "class_code", "class", "level"});
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const auto& s = grid.samples[i];
      w.row({format_double(s.gamma_ll), format_double(s.gamma_lr), format_double(s.d), format_double(s.phi),
             std::to_string(class_code(cls[i].kind)), std::string(to_string(cls[i].kind)),
             cls[i].level ? std::to_string(*cls[i].level) : ""});
    }
  } else {
    json j = header(c);
    j["n_particles"] = c.n;
    j["non_vrep_probability"] = non_vrep_probability(c.n);
    json ellipses = json::array();
    for (const auto& e : exclusion_ellipses(c.n))
      ellipses.push_back({{"level", e.level},
                          {"center_gamma_ll", e.center_gamma_ll},
                          {"minor_radius", e.minor_radius},
                          {"major_radius", e.major_radius},
                          {"area", e.area},
                          {"degeneracy_potential", degeneracy_potential(e.level, c.n, c.u)}});
    j["ellipses"] = ellipses;
    j["class_codes"] = {{"V_REPRESENTABLE", 0}, {"NON_VREP_ELLIPSE_INTERIOR", 1}, {"NON_VREP_BOUNDARY", 2}, {"POLE", 3}};
    json samples = json::array();
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const auto& s = grid.samples[i];
      samples.push_back({{"gamma_ll", s.gamma_ll},
                         {"gamma_lr", s.gamma_lr},
                         {"class_code", class_code(cls[i].kind)},
                         {"level", cls[i].level ? json(*cls[i].level) : json(nullptr)}});
    }
    j["samples"] = samples;
    out.os << j.dump(2) << "\n";
  }
  return kSuccess;
}

// --- bec-force -------------------------------------------------------------

int bec_force_sweep(const RunConfig& c, Output out, std::ostream& err) {
  const auto [nd, np] = parse_grid(c.grid.value_or("8x2"));
  (void)np;
  const double lo = c.d_min.value_or(1e-6), hi = c.d_max.value_or(1e-4);
  check_range(lo, hi, true);
  const double phi = c.phi.value_or(std::numbers::pi / 2);
  if (c.n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const auto ds = log_space(lo, hi, nd);

  struct Row {
    double f = 0, f_minus = 0, f_plus = 0;
    bool ok = true;
  };
  std::vector<Row> rows(ds.size());
  parallel_for(ds.size(), c.workers, [&](std::size_t i) {
    const double d = ds[i], h = 0.05 * d;
    ConstrainedSearchOptions options;
    auto eval = [&](double dd, std::uint64_t k) {
      options.seed = mix_seed(c.seed, 3 * i + k);
      const auto fv = functional_pure_numeric(OneParticleRdm::from_polar(dd, phi), c.n, options);
      rows[i].ok = rows[i].ok && fv.converged;
      return c.u * fv.value;
    };
    rows[i].f = eval(d, 0);
    rows[i].f_minus = eval(d - h, 1);
    rows[i].f_plus = eval(d + h, 2);
  });

  int failed = 0;
  if (out.csv) {
    CsvWriter w(out.os);
    w.row({"d", "phi", "n", "force_analytic", "force_numeric_fd", "functional_numeric", "functional_boundary"});
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const double d = ds[i];
      const double fd = (rows[i].f_plus - rows[i].f_minus) / (0.1 * d);
      failed += !rows[i].ok;
      w.row({format_double(d), format_double(phi), std::to_string(c.n), format_double(bec_force(d, phi, c.n, c.u)),
             format_double(fd), format_double(rows[i].f), format_double(functional_boundary(d, phi, c.n, c.u))});
    }
  } else {
    json j = header(c);
    const auto e = boundary_expansion(phi, c.n, c.u);
    j["phi"] = phi;
    j["expansion"] = {{"e0", e.e0},
                      {"dcoeff", e.dcoeff},
                      {"sqrt_coefficient", e.sqrt_coefficient},
                      {"kappa", e.kappa},
                      {"first_order_energy", e.first_order_energy},
                      {"validity_d_max", kBoundaryValidity}};
    json arr = json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const double d = ds[i];
      failed += !rows[i].ok;
      arr.push_back({{"d", d},
                     {"force_analytic", bec_force(d, phi, c.n, c.u)},
                     {"force_numeric_fd", (rows[i].f_plus - rows[i].f_minus) / (0.1 * d)},
                     {"functional_numeric", rows[i].f},
                     {"functional_boundary", functional_boundary(d, phi, c.n, c.u)}});
    }
    j["samples"] = arr;
    out.os << j.dump(2) << "\n";
  }
  if (hi > kBoundaryValidity)
    err << "warning: the boundary expansion is used beyond its validity region D <= " << kBoundaryValidity << "\n";
  if (failed > 0) {
    err << "error: " << failed << " constrained searches did not converge\n";
    return kNonConverged;
  }
  return kSuccess;
}

// --- energy-min ------------------------------------------------------------

int energy_min(const RunConfig& c, Output out, std::ostream& err) {
  const DimerParams p = dimer_params(c);
  EnergyOptions options;
  options.backend = backend_from_string(c.functional.value_or("pure"));
  const auto [nd, np] = parse_grid(c.grid.value_or("16x32"));
  options.n_radial = nd;
  options.n_angular = np;
  options.search.seed = c.seed;
  options.workers = c.workers;
  const EnergyMinimizationResult r = minimize_energy(p, options);

  std::optional<double> prediction;
  std::string prediction_note;
  try {
    prediction = n_bec_prediction(p, r.phi0);
    if (!n_bec_prediction_valid(p)) prediction_note = "outside u sqrt(N-1) < 0.3";
  } catch (const Error& e) {
    prediction_note = e.what();
  }

  const EdComparison& ed = *r.comparison;
  if (out.csv) {
    CsvWriter w(out.os);
    w.row({"n", "u", "t", "vl", "vr", "functional", "energy", "d0", "phi0", "n_bec", "n_bec_prediction",
           "ed_energy", "ed_d", "ed_phi", "energy_error", "rdm_distance", "boundary_pinned"});
    w.row({std::to_string(c.n), format_double(c.u), format_double(c.t), format_double(c.vl), format_double(c.vr),
           std::string(to_string(options.backend)), format_double(r.energy), format_double(r.d0),
           format_double(r.phi0), format_double(r.n_bec), prediction ? format_double(*prediction) : "",
           format_double(ed.energy), format_double(ed.distance), format_double(ed.angle),
           format_double(ed.energy_error), format_double(ed.rdm_distance), r.boundary_pinned ? "1" : "0"});
  } else {
    json j = header(c);
    j["convention"] = "E = N Tr[h gamma] + U F[gamma], unit-trace gamma";
    j["functional"] = std::string(to_string(options.backend));
    j["energy"] = number(r.energy);
    j["d0"] = r.d0;
    j["phi0"] = r.phi0;
    j["n_bec"] = r.n_bec;
    j["n_bec_prediction"] = prediction ? json(*prediction) : json(nullptr);
    if (!prediction_note.empty()) j["n_bec_prediction_note"] = prediction_note;
    j["boundary_pinned"] = r.boundary_pinned;
    j["evaluations"] = r.evaluations;
    j["ed_reference"] = {{"energy", ed.energy}, {"d", ed.distance}, {"phi", ed.angle}, {"degenerate", ed.degenerate}};
    j["discrepancies"] = {{"energy", number(ed.energy_error)}, {"rdm_frobenius", ed.rdm_distance}};
    j["warnings"] = r.warnings;
    out.os << j.dump(2) << "\n";
  }
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  if (!r.converged) {
    err << "error: energy minimization did not converge\n";
    return kNonConverged;
  }
  return kSuccess;
}

// --- bogoliubov ------------------------------------------------------------

int bogoliubov(const RunConfig& c, Output out, std::ostream&) {
  if (!(c.nw0 > 0)) throw Error(ErrorCode::InvalidArgument, "nw0 must be > 0");
  if (c.sweep == "modes") {
    const auto [count, unused] = parse_grid(c.grid.value_or("64x2"));
    (void)unused;
    if (!(c.np_min > 0) || !(c.np_min < c.np_max))
      throw Error(ErrorCode::InvalidArgument, "need 0 < np_min < np_max");
    const auto nps = log_space(c.np_min, c.np_max, count);
    CsvWriter w(out.os);
    json arr = json::array();
    if (out.csv) w.row({"np", "eps", "f_mode", "e_mode", "lf_gap"});
    for (double n : nps) {
      const double eps = epsilon_of_occupation(n, c.nw0);
      const auto lf = legendre_fenchel_check(eps, c.nw0);
      if (out.csv)
        w.row({format_double(n), format_double(eps), format_double(functional_mode(n, c.nw0)),
               format_double(lf.lhs), format_double(lf.gap)});
      else
        arr.push_back({{"np", n}, {"eps", eps}, {"f_mode", functional_mode(n, c.nw0)}, {"e_mode", lf.lhs}, {"lf_gap", lf.gap}});
    }
    if (!out.csv) {
      json j = {{"schema_version", 1}, {"subcommand", c.subcommand}, {"sweep", "modes"}, {"nw0", c.nw0}, {"modes", arr}};
      out.os << j.dump(2) << "\n";
    }
    return kSuccess;
  }
  if (c.sweep == "force") {
    const auto [count, unused] = parse_grid(c.grid.value_or("16x2"));
    (void)unused;
    const double lo = c.d_min.value_or(1e-8), hi = c.d_max.value_or(1e-5);
    check_range(lo, hi, true);
    if (c.modes < 1) throw Error(ErrorCode::InvalidArgument, "modes must be >= 1");
    GasParams gas;
    gas.density = c.nw0;
    gas.w0 = 1;
    gas.n_particles = c.n;
    const std::vector<double> weights(c.modes, 1.0 / c.modes);
    auto f_path = [&](double d) {
      std::vector<double> occ;
      for (double wp : weights) occ.push_back(c.n * d * wp);
      return functional_modes(occ, c.nw0);
    };
    CsvWriter w(out.os);
    json arr = json::array();
    if (out.csv) w.row({"d", "force", "force_leading", "force_fd"});
    for (double d : log_space(lo, hi, count)) {
      const double h = 1e-3 * d;
      const double fd = (f_path(d + h) - f_path(d - h)) / (2 * h);
      const double f = homogeneous_bec_force(gas, weights, d);
      const double lead = homogeneous_bec_force_leading(gas, weights, d);
      if (out.csv)
        w.row({format_double(d), format_double(f), format_double(lead), format_double(fd)});
      else
        arr.push_back({{"d", d}, {"force", f}, {"force_leading", lead}, {"force_fd", fd}});
    }
    if (!out.csv) {
      json j = {{"schema_version", 1}, {"subcommand", c.subcommand}, {"sweep", "force"}, {"nw0", c.nw0},
                {"n_particles", c.n}, {"modes", c.modes}, {"samples", arr}};
      out.os << j.dump(2) << "\n";
    }
    return kSuccess;
  }
  throw Error(ErrorCode::InvalidArgument, "--sweep must be modes or force");
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.format != "csv" && c.format != "json")
    throw Error(ErrorCode::InvalidArgument, "--format must be csv or json");
  std::ofstream file;
  std::ostream* os = &out;
  if (c.out != "-") {
    file.open(c.out, std::ios::binary);
    if (!file) throw Error(ErrorCode::InvalidArgument, "cannot open output file " + c.out);
    os = &file;
  }
  const Output o{*os, c.format == "csv"};
  if (c.subcommand == "functional-grid") return functional_grid(c, o, err);
  if (c.subcommand == "vrep-map") return vrep_map(c, o, err);
  if (c.subcommand == "bec-force") return bec_force_sweep(c, o, err);
  if (c.subcommand == "energy-min") return energy_min(c, o, err);
  if (c.subcommand == "bogoliubov") return bogoliubov(c, o, err);
  throw Error(ErrorCode::InvalidArgument, "unknown subcommand");
}

}  // namespace

std::pair<int, int> parse_grid(const std::string& text) {
  int d = 0, p = 0;
  char x = 0, extra = 0;
  std::istringstream is(text);
  if (!(is >> d >> x >> p) || (x != 'x' && x != 'X') || (is >> extra))
    throw Error(ErrorCode::InvalidArgument, "--grid expects DxP, e.g. 50x50");
  if (d < 2 || p < 2) throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 2 in each dimension");
  return {d, p};
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      os_ << f;
      continue;
    }
    os_ << '"';
    for (char ch : f) {
      if (ch == '"') os_ << '"';
      os_ << ch;
    }
    os_ << '"';
  }
  os_ << "\r\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"RDMFT toolkit for the N-boson Hubbard dimer and the dilute Bose gas", "rdmft"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags take precedence");
  app.require_subcommand(1);
  app.add_option("--n", c.n, "Number of bosons N")->capture_default_str();
  app.add_option("--u", c.u, "On-site interaction U")->capture_default_str();
  app.add_option("--t", c.t, "Hopping t")->capture_default_str();
  app.add_option("--vl", c.vl, "Left potential v_L")->capture_default_str();
  app.add_option("--vr", c.vr, "Right potential v_R")->capture_default_str();
  app.add_option("--grid", c.grid, "Resolution DxP");
  app.add_option("--d-min", c.d_min, "Smallest D");
  app.add_option("--d-max", c.d_max, "Largest D");
  app.add_option("--format", c.format, "csv or json")->capture_default_str();
  app.add_option("--out", c.out, "Output path, - for stdout")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for the multistart random starts")->capture_default_str();
  app.add_option("--workers", c.workers, "Worker threads, 0 for all cores")->capture_default_str();
  app.add_option("--phi", c.phi, "Natural-orbital angle (bec-force)");
  app.add_option("--functional", c.functional, "pure|ensemble|analytic|all (grid), pure|ensemble|boundary|analytic (energy-min)");
  app.add_option("--nw0", c.nw0, "n W_0 (bogoliubov)")->capture_default_str();
  app.add_option("--np-min", c.np_min, "Smallest mode occupation (bogoliubov)")->capture_default_str();
  app.add_option("--np-max", c.np_max, "Largest mode occupation (bogoliubov)")->capture_default_str();
  app.add_option("--modes", c.modes, "Equal-weight modes on the force path (bogoliubov)")->capture_default_str();
  app.add_option("--sweep", c.sweep, "modes or force (bogoliubov)")->capture_default_str();

  const std::pair<const char*, const char*> commands[] = {
      {"functional-grid", "Tabulate F over the 1RDM disc"},
      {"vrep-map", "Classify 1RDMs as pure or ensemble v-representable"},
      {"bec-force", "Boundary expansion and repulsive force versus D"},
      {"energy-min", "Minimize E(gamma) and compare with exact diagonalization"},
      {"bogoliubov", "Bogoliubov mode energies and the depletion force"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  try {
    return dispatch(c, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::NonConverged:
      case ErrorCode::DegenerateHull: return kNonConverged;
      default: return kUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rdmft::cli
