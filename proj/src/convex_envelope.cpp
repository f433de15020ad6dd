#include "rdmft/convex_envelope.hpp"

#include <Eigen/Geometry>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "rdmft/error.hpp"

namespace rdmft {

namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;

double cross2(const Vector2d& o, const Vector2d& a, const Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Quickhull on points already scaled to the unit cube.
class Quickhull {
 public:
  struct Face {
    std::array<int, 3> v;
    Vector3d normal;
    double offset;
    std::vector<int> outside;
    bool alive = true;
  };

  Quickhull(const std::vector<Vector3d>& pts, double eps) : p_(pts), eps_(eps) {}

  // Returns false when the cloud is coplanar within eps.
  bool run() {
    std::array<int, 4> simplex{};
    if (!initial_simplex(simplex)) return false;
    interior_ = (p_[simplex[0]] + p_[simplex[1]] + p_[simplex[2]] + p_[simplex[3]]) / 4.0;
    const std::array<std::array<int, 3>, 4> tri{{{simplex[0], simplex[1], simplex[2]},
                                                 {simplex[0], simplex[1], simplex[3]},
                                                 {simplex[0], simplex[2], simplex[3]},
                                                 {simplex[1], simplex[2], simplex[3]}}};
    std::vector<int> created;
    for (const auto& t : tri) created.push_back(add_face(t[0], t[1], t[2]));

    std::vector<int> rest;
    for (int i = 0; i < static_cast<int>(p_.size()); ++i)
      if (std::find(simplex.begin(), simplex.end(), i) == simplex.end()) rest.push_back(i);
    assign(rest, created);

    std::vector<int> pending(created);
    while (!pending.empty()) {
      const int f = pending.back();
      pending.pop_back();
      if (!faces_[f].alive || faces_[f].outside.empty()) continue;
      const int eye = farthest(faces_[f]);
      std::vector<int> fresh = add_point(f, eye);
      pending.insert(pending.end(), fresh.begin(), fresh.end());
    }
    return true;
  }

  const std::vector<Face>& faces() const { return faces_; }

 private:
  static std::uint64_t key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  double distance(const Face& f, int i) const { return f.normal.dot(p_[i]) - f.offset; }

  bool initial_simplex(std::array<int, 4>& s) const {
    const int n = static_cast<int>(p_.size());
    if (n < 4) return false;
    int i0 = 0, i1 = 0;
    double best = -1;
    for (int axis = 0; axis < 3; ++axis) {
      int lo = 0, hi = 0;
      for (int i = 1; i < n; ++i) {
        if (p_[i](axis) < p_[lo](axis)) lo = i;
        if (p_[i](axis) > p_[hi](axis)) hi = i;
      }
      const double d = (p_[hi] - p_[lo]).norm();
      if (d > best) {
        best = d;
        i0 = lo;
        i1 = hi;
      }
    }
    if (best <= eps_) return false;
    const Vector3d dir = (p_[i1] - p_[i0]).normalized();
    int i2 = -1;
    best = eps_;
    for (int i = 0; i < n; ++i) {
      const Vector3d r = p_[i] - p_[i0];
      const double d = (r - r.dot(dir) * dir).norm();
      if (d > best) {
        best = d;
        i2 = i;
      }
    }
    if (i2 < 0) return false;
    const Vector3d nrm = (p_[i1] - p_[i0]).cross(p_[i2] - p_[i0]).normalized();
    int i3 = -1;
    best = eps_;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(nrm.dot(p_[i] - p_[i0]));
      if (d > best) {
        best = d;
        i3 = i;
      }
    }
    if (i3 < 0) return false;
    s = {i0, i1, i2, i3};
    return true;
  }

  // Horizon faces inherit the winding of the visible face they replace.
  int add_face(int a, int b, int c, bool orient = true) {
    Face f;
    Vector3d nrm = (p_[b] - p_[a]).cross(p_[c] - p_[a]);
    if (orient && nrm.dot(interior_ - p_[a]) > 0) {
      std::swap(b, c);
      nrm = -nrm;
    }
    f.v = {a, b, c};
    f.normal = nrm.normalized();
    f.offset = f.normal.dot(p_[a]);
    const int id = static_cast<int>(faces_.size());
    for (int e = 0; e < 3; ++e) {
      const auto [it, inserted] = edges_.emplace(key(f.v[e], f.v[(e + 1) % 3]), id);
      if (!inserted) throw Error(ErrorCode::DegenerateHull, "inconsistent hull topology");
    }
    faces_.push_back(std::move(f));
    return id;
  }

  void assign(const std::vector<int>& points, const std::vector<int>& candidates) {
    for (int i : points) {
      for (int f : candidates) {
        if (distance(faces_[f], i) > eps_) {
          faces_[f].outside.push_back(i);
          break;
        }
      }
    }
  }

  int farthest(const Face& f) const {
    int best = f.outside.front();
    double dmax = -1;
    for (int i : f.outside) {
      const double d = distance(f, i);
      if (d > dmax) {
        dmax = d;
        best = i;
      }
    }
    return best;
  }

  std::vector<int> add_point(int start, int eye) {
    std::vector<int> visible{start};
    std::vector<char> seen(faces_.size(), 0), is_visible(faces_.size(), 0);
    seen[start] = is_visible[start] = 1;
    std::vector<std::pair<int, int>> horizon;
    for (std::size_t k = 0; k < visible.size(); ++k) {
      const Face& f = faces_[visible[k]];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[e], b = f.v[(e + 1) % 3];
        const int nb = edges_.at(key(b, a));
        if (!seen[nb]) {
          seen[nb] = 1;
          if (distance(faces_[nb], eye) > eps_) {
            is_visible[nb] = 1;
            visible.push_back(nb);
          }
        }
      }
    }
    std::vector<int> orphans;
    for (int fi : visible) {
      Face& f = faces_[fi];
      for (int e = 0; e < 3; ++e) {
        const int a = f.v[e], b = f.v[(e + 1) % 3];
        if (!is_visible[edges_.at(key(b, a))]) horizon.emplace_back(a, b);
      }
    }
    for (int fi : visible) {
      Face& f = faces_[fi];
      for (int e = 0; e < 3; ++e) edges_.erase(key(f.v[e], f.v[(e + 1) % 3]));
      for (int i : f.outside)
        if (i != eye) orphans.push_back(i);
      f.outside.clear();
      f.alive = false;
    }
    std::vector<int> fresh;
    fresh.reserve(horizon.size());
    for (const auto& [a, b] : horizon) fresh.push_back(add_face(a, b, eye, false));
    assign(orphans, fresh);
    return fresh;
  }

  const std::vector<Vector3d>& p_;
  double eps_;
  Vector3d interior_ = Vector3d::Zero();
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, int> edges_;
};

std::vector<Vector2d> convex_hull_2d(std::vector<Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  std::vector<Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  return hull;
}

}  // namespace

LowerConvexEnvelope::LowerConvexEnvelope(std::span<const Eigen::Vector3d> points)
    : points_(points.begin(), points.end()) {
  if (points_.size() < 3) throw Error(ErrorCode::DegenerateHull, "need at least three points");

  Vector3d lo = points_.front(), hi = points_.front();
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo_ = lo.head<2>();
  hi_ = hi.head<2>();
  Vector3d span = (hi - lo).cwiseMax(1e-300);
  if (hi.z() - lo.z() < 1e-14 * std::max(1.0, std::abs(hi.z()))) span.z() = 1.0;

  std::vector<Vector3d> scaled;
  scaled.reserve(points_.size());
  for (const auto& p : points_) scaled.push_back((p - lo).cwiseQuotient(span));

  Quickhull hull(scaled, 1e-12);
  if (!hull.run()) {
    // Coplanar cloud: the envelope is the plane itself, if the base is 2D.
    std::vector<Vector2d> xy;
    for (const auto& p : points_) xy.push_back(p.head<2>());
    const auto h = convex_hull_2d(xy);
    if (h.size() < 3) throw Error(ErrorCode::DegenerateHull, "(x, y) projections are collinear");
    Eigen::MatrixXd a(points_.size(), 3);
    Eigen::VectorXd z(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      a.row(i) << 1.0, points_[i].x(), points_[i].y();
      z(i) = points_[i].z();
    }
    plane_ = a.colPivHouseholderQr().solve(z);
    planar_ = true;
    for (std::size_t i = 1; i + 1 < h.size(); ++i) {
      // fan triangulation of the base; vertex ids are looked up for reporting only
      auto id = [&](const Vector2d& q) {
        for (std::size_t j = 0; j < points_.size(); ++j)
          if (points_[j].head<2>() == q) return static_cast<int>(j);
        return 0;
      };
      facets_.push_back({{id(h[0]), id(h[i]), id(h[i + 1])}});
    }
    build_index();
    return;
  }

  for (const auto& f : hull.faces()) {
    if (!f.alive) continue;
    if (f.normal.z() < -1e-12) facets_.push_back({f.v});
  }
  if (facets_.empty()) throw Error(ErrorCode::DegenerateHull, "no lower facets");
  build_index();
}

void LowerConvexEnvelope::build_index() {
  triangles_.clear();
  for (const auto& f : facets_) {
    const Vector3d& p0 = points_[f.vertices[0]];
    const Vector3d& p1 = points_[f.vertices[1]];
    const Vector3d& p2 = points_[f.vertices[2]];
    Projected t;
    t.a = p0.head<2>();
    t.b = p1.head<2>();
    t.c = p2.head<2>();
    t.z = {p0.z(), p1.z(), p2.z()};
    const double det = cross2(t.a, t.b, t.c);
    t.inv_det = std::abs(det) > 1e-300 ? 1.0 / det : 0.0;
    triangles_.push_back(t);
  }
  const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(triangles_.size()) / 2.0)));
  nbx_ = nby_ = nb;
  buckets_.assign(static_cast<std::size_t>(nbx_) * nby_, {});
  const Vector2d ext = (hi_ - lo_).cwiseMax(1e-300);
  auto cell = [&](double v, double l, double e, int n) {
    return std::clamp(static_cast<int>((v - l) / e * n), 0, n - 1);
  };
  for (int i = 0; i < static_cast<int>(triangles_.size()); ++i) {
    const auto& t = triangles_[i];
    if (t.inv_det == 0.0) continue;
    const Vector2d tlo = t.a.cwiseMin(t.b).cwiseMin(t.c), thi = t.a.cwiseMax(t.b).cwiseMax(t.c);
    const int x0 = cell(tlo.x(), lo_.x(), ext.x(), nbx_), x1 = cell(thi.x(), lo_.x(), ext.x(), nbx_);
    const int y0 = cell(tlo.y(), lo_.y(), ext.y(), nby_), y1 = cell(thi.y(), lo_.y(), ext.y(), nby_);
    for (int bx = x0; bx <= x1; ++bx)
      for (int by = y0; by <= y1; ++by) buckets_[static_cast<std::size_t>(bx) * nby_ + by].push_back(i);
  }
}

Eigen::Vector3d LowerConvexEnvelope::barycentric(const Projected& t, double x, double y) const {
  const Vector2d q{x, y};
  const double wa = cross2(q, t.b, t.c) * t.inv_det;
  const double wb = cross2(t.a, q, t.c) * t.inv_det;
  return {wa, wb, 1.0 - wa - wb};
}

std::optional<double> LowerConvexEnvelope::evaluate(double x, double y) const {
  const Vector2d ext = (hi_ - lo_).cwiseMax(1e-300);
  const double slack = 1e-9 * std::max(ext.x(), ext.y());
  if (x < lo_.x() - slack || x > hi_.x() + slack || y < lo_.y() - slack || y > hi_.y() + slack)
    return std::nullopt;
  const int bx = std::clamp(static_cast<int>((x - lo_.x()) / ext.x() * nbx_), 0, nbx_ - 1);
  const int by = std::clamp(static_cast<int>((y - lo_.y()) / ext.y() * nby_), 0, nby_ - 1);

  int best = -1;
  double best_violation = std::numeric_limits<double>::infinity();
  Vector3d best_w;
  for (int i : buckets_[static_cast<std::size_t>(bx) * nby_ + by]) {
    const Vector3d w = barycentric(triangles_[i], x, y);
    const double violation = std::max(0.0, -w.minCoeff());
    if (violation < best_violation) {
      best_violation = violation;
      best = i;
      best_w = w;
      if (violation == 0.0) break;
    }
  }
  if (best < 0 || best_violation > 1e-9) return std::nullopt;
  if (planar_) return plane_(0) + plane_(1) * x + plane_(2) * y;
  return best_w.dot(triangles_[best].z);
}

}  // namespace rdmft
