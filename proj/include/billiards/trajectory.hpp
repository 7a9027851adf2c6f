#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "billiards/body.hpp"
#include "billiards/norm.hpp"

namespace billiards {

/// Cyclic list of vertices q_1 -> q_2 -> ... -> q_m -> q_1.
struct ClosedPolyline {
  std::vector<Vector> vertices;

  std::size_t size() const { return vertices.size(); }
  const Vector& at(std::size_t i) const { return vertices[i % vertices.size()]; }
  const Vector& prev(std::size_t i) const { return vertices[(i + vertices.size() - 1) % vertices.size()]; }
  const Vector& next(std::size_t i) const { return vertices[(i + 1) % vertices.size()]; }
};

/// Reflection data at one vertex q for the fragment a -> q -> b.
struct BounceReport {
  Vector point;
  bool on_boundary = false;
  std::vector<std::size_t> active_facets;
  Covector momentum_in;   // momentum of q - a
  Covector momentum_out;  // momentum of b - q
  Covector normal;        // unit normal in N_K(q) closest to momentum_in - momentum_out
  double lambda = 0.0;    // |projection of momentum_in - momentum_out onto N_K(q)|
  double law_residual = 0.0;
  bool classical = false;
};

struct TrajectoryReport {
  std::vector<BounceReport> bounces;
  double length = 0.0;
  bool valid = false;
  bool classical = false;
  std::size_t bounce_count() const { return bounces.size(); }
  double max_residual() const;
};

/// Cyclic sum of |q_{i+1} - q_i|_T.
double length(const ClosedPolyline& q, const NormBody& t);

/// Removes coinciding consecutive vertices and vertices interior to straight runs.
/// Throws PreconditionError when all vertices coincide.
ClosedPolyline normalize(const ClosedPolyline& q, double tol = 1e-10);

/// Indices i with q_{i-1} = q_{i+1} (within tol); requires m >= 3.
std::vector<std::size_t> find_return_points(const ClosedPolyline& q, double tol = 1e-10);

/// Generalized reflection law check at every vertex: momentum_in - momentum_out must
/// lie in N_K(q).  Off-body vertices are reported, not thrown.
TrajectoryReport verify(const Polytope& k, const NormBody& t, const ClosedPolyline& q, double tol = tol::boundary,
                        double law_tol = tol::law);

/// Minimizer of |r - a|_T + |b - r|_T over the hyperplane of h (closed form; for
/// ellipsoidal T in the coordinates where the metric is Euclidean).  When a and b lie
/// strictly on opposite sides the segment crossing is returned.  `hint` selects the
/// point on [a, b] when both lie on the hyperplane.
Vector slide_point(const NormBody& t, const Vector& a, const Vector& b, const Halfspace& h, const Vector& hint);

/// Replaces q_i with the best point of the support hyperplane h.  Throws
/// PreconditionError when h does not support K or cuts a neighbor off.
ClosedPolyline slide_move(const Polytope& k, const NormBody& t, std::size_t i, const ClosedPolyline& q,
                          const Halfspace& h);

struct AcuteMove {
  bool applied = false;  // false: no qualifying planar section (unresolved)
  ClosedPolyline polyline;
  Covector normal;        // reflection normal n at q_i
  Covector side_a;        // n1, paired with the incoming neighbor
  Covector side_b;        // n2, paired with the outgoing neighbor
  double weight_a = 0.0;  // n = weight_a * n1 + weight_b * n2
  double weight_b = 0.0;
  double section_width = 0.0;
  std::string reason;
};

/// Euclidean shortening at a non-smooth vertex: a -> q -> b becomes a -> q1 -> q2 -> b
/// with q1, q2 on support hyperplanes orthogonal to the sides of an obtuse planar
/// section of N_K(q).  Throws PreconditionError at smooth or off-body vertices.
AcuteMove acute_shortening_move(const Polytope& k, std::size_t i, const ClosedPolyline& q);

}  // namespace billiards
