#include "rdmft/boundary.hpp"

#include <cmath>
#include <numbers>

namespace rdmft {

namespace {

struct Orbital {
  double a, b;  // cos(phi/2), sin(phi/2)
  explicit Orbital(double phi) : a(std::cos(phi / 2)), b(std::sin(phi / 2)) {}
};

Eigen::Matrix2d outer(const Eigen::Vector2d& u, const Eigen::Vector2d& v) { return u * v.transpose(); }

}  // namespace

WMatrixElements matrix_elements_w(double phi, int n_particles) {
  if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "n_particles must be >= 1");
  const Orbital o(phi);
  const double n = n_particles;
  const double a2 = o.a * o.a, b2 = o.b * o.b;
  WMatrixElements w;
  w.w0 = (a2 * a2 + b2 * b2) * n * n + 2 * a2 * b2 * n;
  // the sqrt(N) comes from b_perp^dag b_phi |N> = sqrt(N) |N-1>
  w.w1 = 2 * o.a * o.b * (a2 - b2) * (n - 1) * std::sqrt(n);
  w.w2 = 2 * std::numbers::sqrt2 * a2 * b2 * std::sqrt(n * (n - 1));
  return w;
}

double kappa(double phi, int n_particles) {
  const Orbital o(phi);
  const double ab = o.a * o.a * o.b * o.b;
  return 4.0 * (n_particles - 1) * ab * ab;
}

double BoundaryExpansion::value(double distance) const {
  return e0 + dcoeff * distance + sqrt_coefficient * std::sqrt(distance);
}

BoundaryExpansion boundary_expansion(double phi, int n_particles, double interaction) {
  if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "n_particles must be >= 1");
  const double n = n_particles;
  const double s2 = std::sin(phi) * std::sin(phi);
  BoundaryExpansion e;
  e.angle_phi = phi;
  e.n_particles = n_particles;
  e.interaction = interaction;
  e.e0 = interaction * n * (n - 1) * (1 - 0.5 * s2);
  e.dcoeff = interaction * n * (n - 2) * (3 * s2 - 2);
  e.sqrt_coefficient = -interaction * n * std::sqrt(n - 1) * s2;
  e.kappa = kappa(phi, n_particles);
  e.first_order_energy = interaction * (matrix_elements_w(phi, n_particles).w0 - n);
  return e;
}

double functional_boundary(double distance, double phi, int n_particles, double interaction) {
  if (!(distance >= 0)) throw Error(ErrorCode::InvalidArgument, "D must be >= 0");
  return boundary_expansion(phi, n_particles, interaction).value(distance);
}

double bec_force(double distance, double phi, int n_particles, double interaction) {
  if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "n_particles must be >= 1");
  if (!(distance >= 1e-300)) throw Error(ErrorCode::Divergent, "BEC force diverges as D -> 0");
  const double n = n_particles;
  const double s2 = std::sin(phi) * std::sin(phi);
  return -0.5 * interaction * n * std::sqrt(n - 1) * s2 / std::sqrt(distance);
}

double lambda_of_d(double distance, int n_particles, double phi) {
  if (!(distance >= 0)) throw Error(ErrorCode::InvalidArgument, "D must be >= 0");
  if (std::abs(std::sin(phi)) < 1e-12)
    throw Error(ErrorCode::KappaZero, "kappa_N vanishes along the pole directions");
  const double k = kappa(phi, n_particles);
  if (!(k > 0)) throw Error(ErrorCode::KappaZero, "kappa_N vanishes (N = 1)");
  return std::sqrt(distance / k);
}

MatrixX<double> rotated_fock_basis(double phi, int n_particles) {
  if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "n_particles must be >= 1");
  const Orbital o(phi);
  const int dim = n_particles + 1;
  // log n! for the normalization of (b_phi^dag)^k (b_perp^dag)^(N-k) |vac>
  std::vector<double> lf(dim + 1, 0.0);
  for (int i = 1; i <= dim; ++i) lf[i] = lf[i - 1] + std::log(static_cast<double>(i));

  MatrixX<double> basis = MatrixX<double>::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    // polynomial in (x = a_L^dag, y = a_R^dag): coefficient of x^n y^(N-n)
    VectorX<double> poly = VectorX<double>::Zero(dim);
    poly(0) = 1;
    int degree = 0;
    auto multiply = [&](double cx, double cy) {
      VectorX<double> next = VectorX<double>::Zero(dim);
      for (int n = 0; n <= degree; ++n) {
        next(n + 1) += cx * poly(n);
        next(n) += cy * poly(n);
      }
      poly = next;
      ++degree;
    };
    for (int i = 0; i < k; ++i) multiply(o.a, o.b);
    for (int i = k; i < n_particles; ++i) multiply(o.b, -o.a);
    const double norm = -0.5 * (lf[k] + lf[n_particles - k]);
    for (int n = 0; n < dim; ++n)
      basis(n, k) = poly(n) * std::exp(0.5 * (lf[n] + lf[n_particles - n]) + norm);
  }
  return basis;
}

MatrixX<double> counterterm_h1(double phi, int n_particles) {
  const Orbital o(phi);
  const Eigen::Vector2d u(o.a, o.b), v(o.b, -o.a);
  const double w1 = matrix_elements_w(phi, n_particles).w1;
  return -(w1 / std::sqrt(static_cast<double>(n_particles))) *
         one_body_operator<double>(n_particles, outer(v, u) + outer(u, v));
}

MatrixX<double> perturbation_hamiltonian(double phi, int n_particles, double lambda) {
  const Orbital o(phi);
  const Eigen::Vector2d u(o.a, o.b);
  return -one_body_operator<double>(n_particles, outer(u, u)) +
         lambda * (counterterm_h1(phi, n_particles) + interaction_operator<double>(n_particles));
}

}  // namespace rdmft
