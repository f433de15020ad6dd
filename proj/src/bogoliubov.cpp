#include "rdmft/bogoliubov.hpp"

#include <algorithm>
#include <cmath>

#include "rdmft/error.hpp"

namespace rdmft {

namespace {

void check_nw0(double nw0) {
  if (!(nw0 > 0)) throw Error(ErrorCode::InvalidArgument, "nW_0 must be > 0");
}

void check_weights(std::span<const double> weights) {
  double sum = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw Error(ErrorCode::InvalidArgument, "direction weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1) > 1e-12) throw Error(ErrorCode::InvalidArgument, "direction weights must sum to 1");
}

}  // namespace

void GasParams::validate() const {
  if (!(density > 0) || !(w0 > 0)) throw Error(ErrorCode::InvalidArgument, "n W_0 must be > 0");
  if (!(n_particles > 0)) throw Error(ErrorCode::InvalidArgument, "N must be > 0");
  for (double np : occupations)
    if (!(np >= 0)) throw Error(ErrorCode::InvalidArgument, "occupations must be >= 0");
}

double mode_energy(double eps, double nw0) {
  check_nw0(nw0);
  if (!(eps >= 0)) throw Error(ErrorCode::InvalidArgument, "eps must be >= 0");
  if (eps == 0) return -0.5 * nw0;
  // rationalized form, free of cancellation at large eps
  const double root = std::sqrt(eps * eps + 2 * nw0 * eps) + eps;
  return -nw0 * nw0 * eps / (root * root);
}

double epsilon_of_occupation(double np, double nw0) {
  check_nw0(nw0);
  if (!(np > 0)) throw Error(ErrorCode::ZeroOccupation, "eps(n_p) diverges for n_p <= 0");
  const double q = std::sqrt(np * (np + 1));
  // (2n+1)/q - 2 = 1 / (q (2n + 1 + 2q))
  return 0.5 * nw0 / (q * (2 * np + 1 + 2 * q));
}

double occupation_of_epsilon(double eps, double nw0) {
  check_nw0(nw0);
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
  double lo = 0, hi = 0;  // log n_p, eps decreasing in n_p
  while (epsilon_of_occupation(std::exp(lo), nw0) < eps) lo -= 8;
  while (epsilon_of_occupation(std::exp(hi), nw0) > eps) hi += 8;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (epsilon_of_occupation(std::exp(mid), nw0) > eps)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double functional_mode(double np, double nw0) {
  check_nw0(nw0);
  if (!(np >= 0)) throw Error(ErrorCode::InvalidArgument, "n_p must be >= 0");
  // sqrt(n(n+1)) - n = n / (sqrt(n(n+1)) + n)
  if (np == 0) return 0;
  return -nw0 * np / (std::sqrt(np * (np + 1)) + np);
}

double functional_modes(std::span<const double> occupations, double nw0) {
  double sum = 0;
  for (double np : occupations) sum += functional_mode(np, nw0);
  return sum;
}

LegendreFenchelCheck legendre_fenchel_check(double eps, double nw0) {
  check_nw0(nw0);
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be > 0");
  LegendreFenchelCheck r;
  r.lhs = mode_energy(eps, nw0);
  // eps n + F(n) is convex in n, hence unimodal in t = log n
  auto g = [&](double t) {
    const double n = std::exp(t);
    return eps * n + functional_mode(n, nw0);
  };
  double a = -80, b = 40;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1);
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  double f1 = g(x1), f2 = g(x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = g(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = g(x2);
    }
  }
  const double t = 0.5 * (a + b);
  r.minimizer = std::exp(t);
  r.rhs = g(t);
  if (r.rhs > 0) {  // n_p = 0 end of the domain
    r.rhs = 0;
    r.minimizer = 0;
  }
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

double homogeneous_bec_force(const GasParams& params, std::span<const double> weights, double distance) {
  params.validate();
  check_weights(weights);
  if (!(distance > 0)) throw Error(ErrorCode::Divergent, "BEC force diverges at D = 0");
  const double n = params.n_particles;
  double sum = 0;
  for (double w : weights) {
    if (w == 0) continue;
    const double x = n * distance * w;
    // (2x+1)/(2q) - 1 with q = sqrt(x(x+1)), rationalized
    const double q = std::sqrt(x * (x + 1));
    sum += n * w / (2 * q * (2 * x + 1 + 2 * q));
  }
  return -params.nw0() * sum;
}

double homogeneous_bec_force_leading(const GasParams& params, std::span<const double> weights,
                                     double distance) {
  params.validate();
  check_weights(weights);
  if (!(distance > 0)) throw Error(ErrorCode::Divergent, "BEC force diverges at D = 0");
  double sum = 0;
  for (double w : weights) sum += std::sqrt(params.n_particles * w);
  return -0.5 * params.nw0() * sum / std::sqrt(distance);
}

}  // namespace rdmft
