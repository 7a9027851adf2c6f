#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "billiards/body.hpp"

namespace billiards {

/// Witness that a point set cannot be translated into int K: support halfspaces
/// through the points whose normals have the origin in their convex hull.
struct NonFitCertificate {
  struct Entry {
    std::size_t point = 0;
    Covector normal;   // outer normal of a support halfspace of K (unit length)
    double offset = 0.0;
    double weight = 0.0;
    std::optional<std::size_t> facet;  // set when the halfspace is a facet of K
  };
  std::vector<Entry> entries;

  /// |sum weight_i * normal_i|, which vanishes for a valid certificate.
  double imbalance() const;
};

struct FitResult {
  bool fits = false;
  Vector translation;  // fits: pts - translation lie in int K
  double slack = 0.0;  // optimal margin eps*
  NonFitCertificate certificate;  // !fits: taken from the optimal LP duals
};

/// max eps s.t. <a_j, q_i - t> <= b_j - eps.  Fits iff eps* > strictTol.  Certificate
/// entries refer to the translated points q_i - t*, which meet the facets pushed out by
/// -eps*.
FitResult fits_into_interior(const Polytope& k, const std::vector<Vector>& pts);

/// True iff the points fit into no translate of int K.  Requires at least two points.
bool in_P_m(const Polytope& k, const std::vector<Vector>& pts);

struct SurroundingCheck {
  std::optional<NonFitCertificate> certificate;
  int failed_condition = 0;  // 1: point off its hyperplane, 2: K not inside, 3: 0 not in hull
  std::string reason;
  explicit operator bool() const { return certificate.has_value(); }
};

/// One support halfspace per listed point.
struct Assignment {
  std::size_t point = 0;
  Covector normal;
  double offset = 0.0;
  std::optional<std::size_t> facet;
};

/// Checks the three surrounding-normals conditions directly, without a fit LP.
SurroundingCheck certify_surrounding(const Polytope& k, const std::vector<Vector>& pts,
                                     const std::vector<Assignment>& assignment, double tol = tol::boundary);

/// Convenience form: point i is assigned facet facets[i].
SurroundingCheck certify_surrounding(const Polytope& k, const std::vector<Vector>& pts,
                                     const std::vector<std::size_t>& facets, double tol = tol::boundary);

/// Re-checks a non-fit LP certificate via certify_surrounding on the translated points
/// and the correspondingly enlarged facets.
SurroundingCheck revalidate(const Polytope& k, const std::vector<Vector>& pts, const FitResult& fit);

}  // namespace billiards
