#pragma once

#include <variant>
#include <vector>

#include "billiards/numkernel.hpp"

namespace billiards {

// A Minkowski norm on V is given by a convex body T in V* containing the origin in its
// interior: |v|_T = max_{p in T} <p, v>.  The unit ball of the norm is the polar of T.
// The norm need not be symmetric.

struct Euclidean {};

/// T = {p : (p - c)^T M (p - c) <= 1} with M symmetric positive definite.
struct ShiftedEllipsoid {
  Matrix shape;   // M
  Covector center;  // c
};

/// T = conv(vertices).  Usable for length evaluation only (momenta are set-valued).
struct DualPolytope {
  std::vector<Covector> vertices;
};

class NormBody {
 public:
  using Variant = std::variant<Euclidean, ShiftedEllipsoid, DualPolytope>;

  /// Euclidean norm on a d-dimensional space.
  static NormBody euclidean(int d);
  /// Throws PreconditionError unless M is SPD and c^T M c < 1.
  static NormBody ellipsoid(Matrix shape, Covector center);
  /// Throws PreconditionError unless the origin is interior to conv(vertices).
  static NormBody dual_polytope(std::vector<Covector> vertices);

  int dim() const { return dim_; }
  const Variant& variant() const { return body_; }
  bool is_euclidean() const { return std::holds_alternative<Euclidean>(body_); }
  /// True for the variants with a unique momentum (Euclidean and ellipsoids).
  bool is_smooth() const { return !std::holds_alternative<DualPolytope>(body_); }

  /// For smooth variants |v|_T = <c, v> + sqrt(v^T W v); returns W = M^{-1} (identity
  /// for Euclidean).  Throws PreconditionError for DualPolytope.
  Matrix metric() const;
  /// The center c (zero for Euclidean).  Throws for DualPolytope.
  Covector shift() const;

 private:
  NormBody(int d, Variant v) : dim_(d), body_(std::move(v)) {}
  int dim_ = 0;
  Variant body_;
};

/// Support function of T at v.
double norm_eval(const NormBody& t, const Vector& v);

/// The unique p on the boundary of T with <p, v> = |v|_T.
Covector momentum(const NormBody& t, const Vector& v);

/// The body A^T T, so that |v|_{A^T T} = |A v|_T.
NormBody transform_dual(const NormBody& t, const Matrix& a);

}  // namespace billiards
