#pragma once

#include <cstddef>
#include <vector>

#include "billiards/body.hpp"
#include "billiards/containment.hpp"
#include "billiards/norm.hpp"
#include "billiards/trajectory.hpp"

namespace billiards {

/// A claimed optimum failed its own post-checks.
class VerificationError : public Error {
 public:
  using Error::Error;
};

/// Cyclic facet-index sequence, stored in canonical form (lexicographically least
/// among all rotations and reversals).
struct FacetSequence {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  static FacetSequence canonical(std::vector<std::size_t> cyc);
  friend bool operator==(const FacetSequence&, const FacetSequence&) = default;
};

/// Orders by length first, then lexicographically.
bool sequence_less(const FacetSequence& a, const FacetSequence& b);

/// Every canonical sequence of length 2..d+1 without cyclically consecutive repeats
/// whose facet normals have the origin in their convex hull, in sequence_less order.
std::vector<FacetSequence> enumerate_sequences(const Polytope& k);

struct CycleResult {
  std::vector<Vector> points;  // points[i] lies on hyperplane i
  double length = 0.0;
  bool converged = false;
  int sweeps = 0;
};

/// min sum |q_{i+1} - q_i|_T over q_i in the boundary hyperplane of hs[i].  `init`
/// (optional, one point per hyperplane) seeds the iteration.  T must be smooth.
CycleResult min_cycle_on_hyperplanes(const std::vector<Halfspace>& hs, const NormBody& t,
                                     const std::vector<Vector>& init = {});

struct SolveResult {
  double xi = 0.0;
  ClosedPolyline trajectory;
  NonFitCertificate certificate;
  TrajectoryReport report;
  FacetSequence sequence;
  double runner_up_gap = 0.0;  // second-best sequence value minus xi (infinite if none)
  std::size_t sequences_tried = 0;
};

/// Global minimum over enumerate_sequences.  Throws VerificationError if the winner
/// fails verification, certification, or the bounce-count checks.
SolveResult shortest_trajectory(const Polytope& k, const NormBody& t);

/// Greedy descent from a polyline that does not fit into int K: certificate-preserving
/// slides, normal reassignment at non-smooth vertices, return-point dropping and (for the
/// Euclidean norm) acute shortening moves.  Never lengthens.  Throws PreconditionError
/// when q fits into int K.
ClosedPolyline local_improve(const Polytope& k, const NormBody& t, const ClosedPolyline& q);

struct BruteForceResult {
  double xi = 0.0;
  ClosedPolyline polyline;
  bool resolution_warning = false;  // refinement moved a vertex by more than one coarse cell
  std::size_t fit_tests = 0;
};

/// Direct search over boundary polylines with 2..d+1 vertices: exhaustive on a coarse
/// boundary sample, then pattern search down to step `grid`.  Every accepted candidate
/// passes the in_P_m test.  An upper bound for xi.  Supports d = 2 and d = 3.
BruteForceResult brute_force_xi(const Polytope& k, const NormBody& t, double grid);

}  // namespace billiards
