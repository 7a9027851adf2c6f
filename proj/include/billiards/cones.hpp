#pragma once

#include <cstdint>
#include <vector>

#include "billiards/body.hpp"
#include "billiards/numkernel.hpp"

namespace billiards {

/// Finitely generated cone with apex at the origin.  Normal cones live in V*,
/// tangent cones in V.
template <class Elem>
struct Cone {
  int dim = 0;  // ambient dimension
  std::vector<Elem> generators;
};
using NormalCone = Cone<Covector>;
using TangentCone = Cone<Vector>;

/// Orthogonal splitting C = F x P with F the lineality space and P pointed.
template <class Elem>
struct ConeDecomposition {
  std::vector<Elem> lineality_basis;     // orthonormal basis of F
  std::vector<Elem> pointed_generators;  // extreme rays of P, unit length, orthogonal to F
  // Largest pairwise angle between extreme rays of P.  This equals the spherical
  // diameter of P whenever every pairwise angle is below pi/2.
  double spherical_diameter = 0.0;
  bool right_or_wider = false;  // some pair of rays meets at >= pi/2 - angTol

  int lineality_dim() const { return static_cast<int>(lineality_basis.size()); }
};

/// Cone generated by the normals of the facets active at q (extreme rays only).
NormalCone normal_cone(const Polytope& k, const Vector& q, double tol = tol::boundary);

/// {v : <a_j, v> <= 0 for every active facet j}, as +-lineality basis plus extreme rays.
TangentCone tangent_cone(const Polytope& k, const Vector& q, double tol = tol::boundary);

template <class Elem>
ConeDecomposition<Elem> decompose(const Cone<Elem>& c);

/// Membership of x in the cone, decided by nonnegative least squares.
template <class Elem>
bool cone_contains(const Cone<Elem>& c, const Elem& x, double tol = 1e-9);

/// Keeps only generators that are not nonnegative combinations of the others.
template <class Elem>
std::vector<Elem> extreme_rays(const std::vector<Elem>& generators);

/// Acuteness condition at a non-smooth boundary point.  Throws PreconditionError at
/// interior or smooth points.
bool is_acute_point(const Polytope& k, const Vector& q, double tol = tol::boundary);

struct FaceVerdict {
  Face face;
  Vector representative;
  ConeDecomposition<Vector> tangent;
  bool acute = false;
};

struct AcutenessReport {
  std::vector<FaceVerdict> faces;  // every face of dimension <= d-2
  bool acute = false;
};

AcutenessReport is_acute_body(const Polytope& k);

/// Dihedral angles pi - angle(n_i, n_j) of a d-simplex for i < j, lexicographic.
std::vector<double> simplex_dihedral_angles(const Polytope& s);

/// Angular section of the normal cone by a 2-plane through one of its rays.
struct PlanarSection {
  double lo = 0.0;  // angle of the lower side relative to the ray (<= 0)
  double hi = 0.0;  // angle of the upper side (>= 0)
  Covector side_lo;
  Covector side_hi;
  double width() const { return hi - lo; }
};

/// Section of N = polar(t) by span{ray, second}.  `ray` must lie in N; `second` is
/// orthogonalized against it.
PlanarSection planar_section(const TangentCone& t, const Covector& ray, const Covector& second);

enum class ProbeVerdict { Confirmed, Unresolved };

/// Sampling probe for the weak acuteness condition: every sampled ray of N_K(q) must
/// admit a planar section of angular width > pi/2 + angTol.  One-sided by construction.
ProbeVerdict weak_acuteness_probe(const Polytope& k, const Vector& q, int ray_samples = 256, int plane_samples = 256,
                                  std::uint64_t seed = 0);

}  // namespace billiards
