#pragma once

// Lower convex envelope of a scattered height field z(x, y), computed from the
// lower facets of the 3D convex hull of the point cloud.

#include <Eigen/Core>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace rdmft {

class LowerConvexEnvelope {
 public:
  struct Facet {
    std::array<int, 3> vertices;  // indices into the input cloud
  };

  /// Throws DegenerateHull when the (x, y) projections are collinear.
  explicit LowerConvexEnvelope(std::span<const Eigen::Vector3d> points);

  /// Height of the envelope above (x, y); empty outside the projected hull.
  std::optional<double> evaluate(double x, double y) const;

  const std::vector<Facet>& lower_facets() const { return facets_; }
  bool planar() const { return planar_; }

 private:
  struct Projected {
    Eigen::Vector2d a, b, c;
    Eigen::Vector3d z;
    double inv_det;
  };

  void build_index();
  Eigen::Vector3d barycentric(const Projected& t, double x, double y) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<Facet> facets_;
  std::vector<Projected> triangles_;
  bool planar_ = false;
  Eigen::Vector3d plane_ = Eigen::Vector3d::Zero();  // z = p0 + p1 x + p2 y when planar

  // uniform bucket grid over the (x, y) bounding box
  Eigen::Vector2d lo_ = Eigen::Vector2d::Zero(), hi_ = Eigen::Vector2d::Zero();
  int nbx_ = 1, nby_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace rdmft
