#pragma once

// N-boson Hubbard dimer in the configuration basis |n, N-n> (n bosons on the
// left site). All amplitudes are real; the 1RDM is normalized to unit trace.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

#include "rdmft/error.hpp"

namespace rdmft {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct BasicDimerParams {
  int n_particles = 2;
  Scalar hopping = 1;
  Scalar potential_left = 0;
  Scalar potential_right = 0;
  Scalar interaction = 1;

  void validate() const {
    if (n_particles < 1) throw Error(ErrorCode::InvalidArgument, "n_particles must be >= 1");
    if (!(interaction >= 0)) throw Error(ErrorCode::InvalidArgument, "interaction must be >= 0");
  }

  /// (v_L - v_R) / (2t), the reduced asymmetry used by the condensate-number formula.
  Scalar reduced_asymmetry() const { return (potential_left - potential_right) / (2 * hopping); }
};

using DimerParams = BasicDimerParams<double>;

/// Real amplitudes alpha_0..alpha_N over |n, N-n>.
template <typename Scalar>
class BasicConfigurationVector {
 public:
  static constexpr double kNormTolerance = 1e-12;

  BasicConfigurationVector() = default;

  explicit BasicConfigurationVector(VectorX<Scalar> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 2)
      throw Error(ErrorCode::InvalidArgument, "configuration vector needs N+1 >= 2 entries");
    using std::abs;
    if (abs(coeffs_.squaredNorm() - Scalar(1)) > Scalar(kNormTolerance))
      throw Error(ErrorCode::InvalidArgument, "configuration vector is not normalized");
  }

  static BasicConfigurationVector normalized(VectorX<Scalar> coeffs) {
    const Scalar norm = coeffs.norm();
    if (!(norm > 0)) throw Error(ErrorCode::InvalidArgument, "zero configuration vector");
    return BasicConfigurationVector(coeffs / norm);
  }

  /// N bosons on the left site for n = N.
  static BasicConfigurationVector configuration(int n_particles, int n_left) {
    VectorX<Scalar> c = VectorX<Scalar>::Zero(n_particles + 1);
    c(n_left) = 1;
    return BasicConfigurationVector(std::move(c));
  }

  /// All N bosons in cos(phi/2)|L> + sin(phi/2)|R>.
  static BasicConfigurationVector condensate(int n_particles, Scalar phi) {
    using std::cos;
    using std::sin;
    using std::sqrt;
    const Scalar a = cos(phi / 2), b = sin(phi / 2);
    VectorX<Scalar> c(n_particles + 1);
    // binomial(N, n) built incrementally to stay exact for moderate N
    Scalar binom = 1;
    for (int n = 0; n <= n_particles; ++n) {
      if (n > 0) binom = binom * Scalar(n_particles - n + 1) / Scalar(n);
      c(n) = sqrt(binom) * integer_power(a, n) * integer_power(b, n_particles - n);
    }
    return normalized(std::move(c));
  }

  int n_particles() const { return static_cast<int>(coeffs_.size()) - 1; }
  const VectorX<Scalar>& coeffs() const { return coeffs_; }
  Scalar operator[](int n) const { return coeffs_(n); }

 private:
  static Scalar integer_power(Scalar x, int k) {
    Scalar r = 1;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  }

  VectorX<Scalar> coeffs_;
};

using ConfigurationVector = BasicConfigurationVector<double>;

template <typename Scalar>
struct PolarPoint {
  Scalar distance;  // D in [0, 1/2]
  Scalar angle;     // phi in [0, 2 pi)
};

/// Radius of the 1RDM disc measured from its center (1/2, 0).
template <typename Scalar>
Scalar disc_radius(Scalar gamma_ll, Scalar gamma_lr) {
  using std::sqrt;
  const Scalar x = gamma_ll - Scalar(0.5);
  return sqrt(gamma_lr * gamma_lr + x * x);
}

template <typename Scalar>
PolarPoint<Scalar> polar_from_cartesian(Scalar gamma_ll, Scalar gamma_lr) {
  using std::atan2;
  const Scalar r = disc_radius(gamma_ll, gamma_lr);
  if (r < Scalar(1e-14))
    throw Error(ErrorCode::CenterSingular, "angle undefined at the disc center");
  Scalar phi = atan2(gamma_lr, gamma_ll - Scalar(0.5));
  if (phi < 0) phi += 2 * std::numbers::pi_v<Scalar>;
  if (phi >= 2 * std::numbers::pi_v<Scalar>) phi = 0;
  return {Scalar(0.5) - r, phi};
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> cartesian_from_polar(Scalar distance, Scalar angle) {
  using std::cos;
  using std::sin;
  const Scalar r = (1 - 2 * distance) / 2;
  return {Scalar(0.5) + r * cos(angle), r * sin(angle)};
}

template <typename Scalar>
class BasicOneParticleRdm {
 public:
  BasicOneParticleRdm() = default;
  BasicOneParticleRdm(Scalar gamma_ll, Scalar gamma_lr) : gamma_ll_(gamma_ll), gamma_lr_(gamma_lr) {}

  static BasicOneParticleRdm from_polar(Scalar distance, Scalar angle) {
    const auto g = cartesian_from_polar(distance, angle);
    return {g(0), g(1)};
  }

  Scalar gamma_ll() const { return gamma_ll_; }
  Scalar gamma_lr() const { return gamma_lr_; }
  Scalar gamma_rr() const { return 1 - gamma_ll_; }

  Scalar radius() const { return disc_radius(gamma_ll_, gamma_lr_); }
  /// Smaller eigenvalue, i.e. the distance to the disc boundary.
  Scalar distance() const { return Scalar(0.5) - radius(); }
  /// Natural-orbital angle; throws CenterSingular at the maximally mixed point.
  Scalar angle() const { return polar_from_cartesian(gamma_ll_, gamma_lr_).angle; }
  PolarPoint<Scalar> polar() const { return polar_from_cartesian(gamma_ll_, gamma_lr_); }

  bool in_disc(Scalar tolerance = Scalar(1e-12)) const {
    const Scalar x = gamma_ll_ - Scalar(0.5);
    return gamma_lr_ * gamma_lr_ + x * x <= Scalar(0.25) + tolerance;
  }

  Eigen::Matrix<Scalar, 2, 2> matrix() const {
    Eigen::Matrix<Scalar, 2, 2> m;
    m << gamma_ll_, gamma_lr_, gamma_lr_, gamma_rr();
    return m;
  }

  /// (1 - D, D)
  Eigen::Matrix<Scalar, 2, 1> eigenvalues() const {
    const Scalar d = distance();
    return {1 - d, d};
  }

  Scalar frobenius_distance(const BasicOneParticleRdm& other) const {
    return (matrix() - other.matrix()).norm();
  }

 private:
  Scalar gamma_ll_ = 1;
  Scalar gamma_lr_ = 0;
};

using OneParticleRdm = BasicOneParticleRdm<double>;

/// sqrt((n+1)(N-n)) = <n+1, N-n-1| b_L^dag b_R |n, N-n>
template <typename Scalar>
Scalar hopping_amplitude(int n_particles, int n_left) {
  using std::sqrt;
  return sqrt(Scalar(n_left + 1) * Scalar(n_particles - n_left));
}

/// Sum_{ij} h_ij b_i^dag b_j for a 2x2 one-particle matrix h in the (L, R) basis.
template <typename Scalar>
MatrixX<Scalar> one_body_operator(int n_particles, const Eigen::Matrix<Scalar, 2, 2>& h) {
  const int dim = n_particles + 1;
  MatrixX<Scalar> op = MatrixX<Scalar>::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    op(n, n) = h(0, 0) * Scalar(n) + h(1, 1) * Scalar(n_particles - n);
    if (n < n_particles) {
      const Scalar c = hopping_amplitude<Scalar>(n_particles, n);
      op(n + 1, n) += h(0, 1) * c;
      op(n, n + 1) += h(1, 0) * c;
    }
  }
  return op;
}

/// Diagonal weight n(n-1) + (N-n)(N-n-1) of the on-site interaction (U = 1).
template <typename Scalar>
Scalar interaction_weight(int n_particles, int n_left) {
  const Scalar n = n_left, m = n_particles - n_left;
  return n * (n - 1) + m * (m - 1);
}

template <typename Scalar>
MatrixX<Scalar> interaction_operator(int n_particles) {
  const int dim = n_particles + 1;
  MatrixX<Scalar> w = MatrixX<Scalar>::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) w(n, n) = interaction_weight<Scalar>(n_particles, n);
  return w;
}

/// One-particle Hamiltonian [[v_L, -t], [-t, v_R]].
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> one_particle_hamiltonian(const BasicDimerParams<Scalar>& p) {
  Eigen::Matrix<Scalar, 2, 2> h;
  h << p.potential_left, -p.hopping, -p.hopping, p.potential_right;
  return h;
}

/// Symmetric tridiagonal Hamiltonian of size N+1.
template <typename Scalar>
MatrixX<Scalar> build_hamiltonian(const BasicDimerParams<Scalar>& params) {
  params.validate();
  return one_body_operator<Scalar>(params.n_particles, one_particle_hamiltonian(params)) +
         params.interaction * interaction_operator<Scalar>(params.n_particles);
}

template <typename Scalar>
BasicOneParticleRdm<Scalar> rdm_from_coeffs(const VectorX<Scalar>& a) {
  const int n_particles = static_cast<int>(a.size()) - 1;
  Scalar ll = 0, lr = 0;
  for (int n = 0; n <= n_particles; ++n) {
    ll += Scalar(n) * a(n) * a(n);
    if (n < n_particles) lr += hopping_amplitude<Scalar>(n_particles, n) * a(n) * a(n + 1);
  }
  return {ll / Scalar(n_particles), lr / Scalar(n_particles)};
}

template <typename Scalar>
BasicOneParticleRdm<Scalar> rdm_from_state(const BasicConfigurationVector<Scalar>& state) {
  return rdm_from_coeffs(state.coeffs());
}

template <typename Scalar>
struct BasicGroundStateResult {
  Scalar energy;
  BasicConfigurationVector<Scalar> state;
  BasicOneParticleRdm<Scalar> rdm;
  Scalar gap;
  bool degenerate;  // gap below kDegeneracyThreshold * max(1, |E_0|)
};

using GroundStateResult = BasicGroundStateResult<double>;

inline constexpr double kDegeneracyThreshold = 1e-10;

/// Largest-magnitude entry made positive.
template <typename Scalar>
VectorX<Scalar> fix_sign(VectorX<Scalar> v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0) v = -v;
  return v;
}

template <typename Scalar>
BasicGroundStateResult<Scalar> ground_state(const BasicDimerParams<Scalar>& params) {
  const MatrixX<Scalar> h = build_hamiltonian(params);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(h);
  const VectorX<Scalar>& evals = solver.eigenvalues();
  VectorX<Scalar> v = fix_sign<Scalar>(solver.eigenvectors().col(0));
  v.normalize();
  using std::abs;
  using std::max;
  const Scalar gap = evals(1) - evals(0);
  BasicConfigurationVector<Scalar> state(std::move(v));
  auto rdm = rdm_from_state(state);
  return {evals(0), std::move(state), rdm, gap,
          gap < Scalar(kDegeneracyThreshold) * max(Scalar(1), abs(evals(0)))};
}

}  // namespace rdmft
