#pragma once

#include <cstddef>
#include <vector>

#include "billiards/numkernel.hpp"

namespace billiards {

/// The closed halfspace {x : <normal, x> <= offset}.
struct Halfspace {
  Covector normal;
  double offset = 0.0;

  /// Same halfspace with a Euclidean-unit normal.
  Halfspace normalized() const;
  double violation(const Vector& x) const { return pair(normal, x) - offset; }
};

enum class PointClass { Interior, SmoothBoundary, NonSmoothBoundary };

/// Indices of the facets active at a point, sorted ascending.
struct FaceRef {
  std::vector<std::size_t> active_facets;

  PointClass classification() const {
    if (active_facets.empty()) return PointClass::Interior;
    return active_facets.size() == 1 ? PointClass::SmoothBoundary : PointClass::NonSmoothBoundary;
  }
};

/// A nonempty face of the polytope other than the polytope itself.
struct Face {
  std::vector<std::size_t> vertices;  // indices into Polytope::vertices()
  std::vector<std::size_t> facets;    // every facet containing the face
  int dim = 0;
};

/// Bounded full-dimensional convex polytope holding both descriptions.
/// Facets are irredundant with unit normals; vertices are deduplicated.
class Polytope {
 public:
  static Polytope from_hrep(std::vector<Halfspace> halfspaces);
  static Polytope from_vrep(const std::vector<Vector>& points);

  int dim() const { return dim_; }
  const std::vector<Halfspace>& facets() const { return facets_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const Halfspace& facet(std::size_t j) const { return facets_.at(j); }
  std::size_t num_facets() const { return facets_.size(); }

  /// Center and radius of the largest inscribed ball.
  const Vector& chebyshev_center() const { return center_; }
  double inradius() const { return inradius_; }
  /// Largest distance between two vertices.
  double diameter() const;

  /// Vertex indices lying on facet j.
  const std::vector<std::size_t>& facet_vertices(std::size_t j) const { return incidence_.at(j); }
  /// Average of the vertices of facet j (a relative-interior point).
  Vector facet_centroid(std::size_t j) const;

  bool contains(const Vector& x, double tol = tol::boundary) const;

 private:
  Polytope() = default;

  int dim_ = 0;
  std::vector<Halfspace> facets_;
  std::vector<Vector> vertices_;
  std::vector<std::vector<std::size_t>> incidence_;
  Vector center_;
  double inradius_ = 0.0;
};

/// Facets whose hyperplane passes within `tol` of q.  Throws PreconditionError when q
/// lies outside K by more than `tol`.
FaceRef active_facets(const Polytope& k, const Vector& q, double tol = tol::boundary);

/// max over K of <n, x>.
double support_value(const Polytope& k, const Covector& n);

/// All faces of dimension 0..d-2, ordered by dimension then vertex indices.
std::vector<Face> low_dimensional_faces(const Polytope& k);

/// The image A*K + t.
Polytope transformed(const Polytope& k, const Matrix& a, const Vector& t);
Polytope scaled(const Polytope& k, double factor);
Polytope translated(const Polytope& k, const Vector& t);

}  // namespace billiards
