#pragma once

// Reference computations that share no code with the library: a Jacobi
// eigensolver, a two-mode Fock space built from ladder operators, direct
// sweeps of the N = 2 and N = 3 constraint manifolds, and brute-force envelopes.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Cyclic Jacobi rotations; eigenvalues sorted ascending.
inline VectorXd jacobi_eigenvalues(MatrixXd a, double tol = 1e-14) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) < tol * std::max(1.0, a.norm())) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (a(p, q) == 0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1 : -1) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  VectorXd ev = a.diagonal();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

/// Two bosonic modes truncated at N quanta each; state |nL, nR> has index nL (N+1) + nR.
struct FockSpace {
  int n_max;
  MatrixXd a_l, a_r;

  explicit FockSpace(int n) : n_max(n) {
    const int m = n + 1, dim = m * m;
    a_l = MatrixXd::Zero(dim, dim);
    a_r = MatrixXd::Zero(dim, dim);
    for (int nl = 0; nl <= n; ++nl) {
      for (int nr = 0; nr <= n; ++nr) {
        const int k = nl * m + nr;
        if (nl > 0) a_l((nl - 1) * m + nr, k) = std::sqrt(static_cast<double>(nl));
        if (nr > 0) a_r(nl * m + nr - 1, k) = std::sqrt(static_cast<double>(nr));
      }
    }
  }

  int index(int nl, int nr) const { return nl * (n_max + 1) + nr; }
  VectorXd vacuum() const {
    VectorXd v = VectorXd::Zero(a_l.rows());
    v(0) = 1;
    return v;
  }

  /// Restriction of an operator to the N-particle sector in the order |n, N-n>, n = 0..N.
  MatrixXd sector(const MatrixXd& op, int n) const {
    MatrixXd out(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) out(i, j) = op(index(i, n - i), index(j, n - j));
    return out;
  }
  VectorXd sector(const VectorXd& v, int n) const {
    VectorXd out(n + 1);
    for (int i = 0; i <= n; ++i) out(i) = v(index(i, n - i));
    return out;
  }
};

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

/// Least squares of y on the given basis functions evaluated at x.
inline VectorXd least_squares(const std::vector<std::function<double(double)>>& basis,
                              const std::vector<double>& x, const std::vector<double>& y) {
  MatrixXd a(x.size(), basis.size());
  VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < basis.size(); ++j) a(i, j) = basis[j](x[i]);
    b(i) = y[i];
  }
  return a.householderQr().solve(b);
}

/// N = 2: with alpha = (a0, a1, a2), gamma_LL and the norm fix a0^2 and a2^2
/// for each a1; roots of the gamma_LR residual in a1 enumerate the feasible
/// set, on which <W> = 2 (1 - a1^2).
inline double pure_functional_n2_sweep(double gll, double glr, int samples = 200000) {
  double best = std::numeric_limits<double>::infinity();
  for (int s0 : {-1, 1}) {
    for (int s2 : {-1, 1}) {
      auto residual = [&](double a1, bool& ok) {
        const double a2sq = gll - 0.5 * a1 * a1;
        const double a0sq = 1 - a1 * a1 - a2sq;
        ok = a2sq >= -1e-15 && a0sq >= -1e-15;
        const double a0 = s0 * std::sqrt(std::max(0.0, a0sq)), a2 = s2 * std::sqrt(std::max(0.0, a2sq));
        return a1 * (a0 + a2) / std::sqrt(2.0) - glr;
      };
      double prev_x = -1, prev_r = 0;
      bool prev_ok = false;
      for (int i = 0; i <= samples; ++i) {
        const double x = -1 + 2.0 * i / samples;
        bool ok = false;
        const double r = residual(x, ok);
        if (ok && std::abs(r) < 1e-14) best = std::min(best, 2 * (1 - x * x));
        if (ok && prev_ok && (r > 0) != (prev_r > 0)) {
          double lo = prev_x, hi = x, rlo = prev_r;
          for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            bool okm = false;
            const double rm = residual(mid, okm);
            if ((rm > 0) == (rlo > 0)) {
              lo = mid;
              rlo = rm;
            } else {
              hi = mid;
            }
          }
          const double a1 = 0.5 * (lo + hi);
          best = std::min(best, 2 * (1 - a1 * a1));
        }
        prev_x = x;
        prev_r = r;
        prev_ok = ok;
      }
    }
  }
  return best;
}

/// N = 3: for each (a1, a2) the gamma_LL and norm constraints fix |a3| and
/// |a0|; the gamma_LR residual is bisected along a2 for a fine set of a1.
/// Edges of the admissible a2 range are located and used as samples, since
/// minimizers tend to have a small a0 or a3. Returns the smallest <W> over the
/// located feasible points (an upper bound on F that converges to it with the
/// sweep resolution).
inline double pure_functional_n3_sweep(double gll, double glr, int n1 = 1500, int n2 = 1500) {
  const double s3 = std::sqrt(3.0), s4 = 2.0;
  double best = std::numeric_limits<double>::infinity();
  for (int sg0 : {-1, 1}) {
    for (int sg3 : {-1, 1}) {
      for (int i = 0; i <= n1; ++i) {
        const double a1 = -1 + 2.0 * i / n1;
        auto eval = [&](double a2, bool& ok, double& w) {
          const double a3sq = (3 * gll - a1 * a1 - 2 * a2 * a2) / 3;
          const double a0sq = 1 - a1 * a1 - a2 * a2 - a3sq;
          ok = a3sq >= 0 && a0sq >= 0;
          const double a0 = sg0 * std::sqrt(std::max(0.0, a0sq)), a3 = sg3 * std::sqrt(std::max(0.0, a3sq));
          w = 6 * a0 * a0 + 2 * a1 * a1 + 2 * a2 * a2 + 6 * a3 * a3;
          return (s3 * a0 * a1 + s4 * a1 * a2 + s3 * a2 * a3) / 3 - glr;
        };
        auto root = [&](double lo, double hi, double rlo) {
          for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            bool okm = false;
            double wm = 0;
            const double rm = eval(mid, okm, wm);
            if ((rm > 0) == (rlo > 0)) {
              lo = mid;
              rlo = rm;
            } else {
              hi = mid;
            }
          }
          bool okm = false;
          double wm = 0;
          eval(0.5 * (lo + hi), okm, wm);
          if (okm) best = std::min(best, wm);
        };
        // admissible end of [from, to] where eval(from) is admissible
        auto edge = [&](double from, double to) {
          for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (from + to);
            bool okm = false;
            double wm = 0;
            eval(mid, okm, wm);
            (okm ? from : to) = mid;
          }
          return from;
        };
        double px = 0, pr = 0;
        bool pok = false;
        auto visit = [&](double x, double r) {
          if (pok && (r > 0) != (pr > 0)) root(px, x, pr);
          px = x;
          pr = r;
          pok = true;
        };
        for (int j = 0; j <= n2; ++j) {
          const double a2 = -1 + 2.0 * j / n2;
          bool ok = false;
          double w = 0;
          const double r = eval(a2, ok, w);
          if (ok && !pok && j > 0) {
            const double e = edge(a2, px);
            bool oke = false;
            double we = 0;
            const double re = eval(e, oke, we);
            visit(e, re);
          }
          if (ok) {
            visit(a2, r);
          } else if (pok) {
            const double e = edge(px, a2);
            bool oke = false;
            double we = 0;
            const double re = eval(e, oke, we);
            visit(e, re);
            pok = false;
          }
          if (!ok) px = a2;
        }
      }
    }
  }
  return best;
}

/// Lower envelope by enumerating every triangle of the cloud (small clouds only).
inline double brute_force_envelope(const std::vector<Eigen::Vector3d>& p, double x, double y) {
  double best = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const double x1 = p[j].x() - p[i].x(), y1 = p[j].y() - p[i].y();
        const double x2 = p[k].x() - p[i].x(), y2 = p[k].y() - p[i].y();
        const double det = x1 * y2 - y1 * x2;
        if (std::abs(det) < 1e-14) continue;
        const double qx = x - p[i].x(), qy = y - p[i].y();
        const double wj = (qx * y2 - qy * x2) / det, wk = (x1 * qy - y1 * qx) / det;
        const double wi = 1 - wj - wk;
        if (wi < -1e-12 || wj < -1e-12 || wk < -1e-12) continue;
        best = std::min(best, wi * p[i].z() + wj * p[j].z() + wk * p[k].z());
      }
    }
  }
  return best;
}

/// Legendre-Fenchel biconjugate of a sampled surface over a grid of slopes:
/// a lower bound on the convex envelope that tightens with the slope grid.
struct Biconjugate {
  std::vector<Eigen::Vector3d> planes;  // (sx, sy, conjugate value)

  Biconjugate(const std::vector<Eigen::Vector3d>& cloud, double slope_max, int n) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double sx = -slope_max + 2 * slope_max * i / (n - 1);
        const double sy = -slope_max + 2 * slope_max * j / (n - 1);
        double c = -std::numeric_limits<double>::infinity();
        for (const auto& q : cloud) c = std::max(c, sx * q.x() + sy * q.y() - q.z());
        planes.emplace_back(sx, sy, c);
      }
    }
  }

  double operator()(double x, double y) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : planes) best = std::max(best, s.x() * x + s.y() * y - s.z());
    return best;
  }
};

}  // namespace oracle
