#include "billiards/containment.hpp"

#include <cmath>

namespace billiards {

double NonFitCertificate::imbalance() const {
  if (entries.empty()) return 0.0;
  Covector s = Covector::zero(entries.front().normal.dim());
  for (const auto& e : entries) s += e.weight * e.normal;
  return norm2(s);
}

FitResult fits_into_interior(const Polytope& k, const std::vector<Vector>& pts) {
  if (pts.empty()) throw PreconditionError("fits_into_interior: no points");
  const int d = k.dim();
  const auto du = static_cast<std::size_t>(d);
  for (const auto& q : pts)
    if (q.dim() != d) throw DimensionMismatch("fits_into_interior: point dimension differs from body");

  // Unknowns (t, eps), all free.  Row (i, j): -<a_j, t> + eps <= b_j - <a_j, q_i>.
  LpProblem lp;
  lp.objective.assign(du + 1, 0.0);
  lp.objective[du] = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (const auto& h : k.facets()) {
      std::vector<double> row(du + 1);
      for (std::size_t r = 0; r < du; ++r) row[r] = -h.normal[static_cast<int>(r)];
      row[du] = 1.0;
      lp.add(std::move(row), Relation::LessEqual, h.offset - pair(h.normal, pts[i]));
    }
  }
  const LpOutcome o = solve_lp(lp);
  if (o.status != LpStatus::Optimal) throw NumericalError("fits_into_interior: LP returned " + to_string(o.status));

  FitResult out;
  out.translation = Vector(std::vector<double>(o.primal.begin(), o.primal.begin() + d));
  out.slack = o.primal[du];
  out.fits = out.slack > tol::strict;
  if (out.fits) return out;

  // Dual weights: sum mu = 1 (eps column), sum mu a_j = 0 (t columns).
  const std::size_t nf = k.num_facets();
  double total = 0.0;
  for (std::size_t r = 0; r < o.dual.size(); ++r) {
    if (o.dual[r] < 1e-12) continue;
    const std::size_t i = r / nf, j = r % nf;
    out.certificate.entries.push_back({i, k.facet(j).normal, k.facet(j).offset - out.slack, o.dual[r], j});
    total += o.dual[r];
  }
  for (auto& e : out.certificate.entries) e.weight /= total;
  return out;
}

bool in_P_m(const Polytope& k, const std::vector<Vector>& pts) {
  if (pts.size() < 2) throw PreconditionError("in_P_m: a closed polyline needs at least two vertices");
  return !fits_into_interior(k, pts).fits;
}

SurroundingCheck certify_surrounding(const Polytope& k, const std::vector<Vector>& pts,
                                     const std::vector<Assignment>& assignment, double tol) {
  SurroundingCheck out;
  if (assignment.empty()) {
    out.failed_condition = 3;
    out.reason = "no halfspaces assigned";
    return out;
  }
  std::vector<Covector> normals;
  for (const auto& a : assignment) {
    if (a.point >= pts.size()) throw PreconditionError("certify_surrounding: assignment refers to a missing point");
    const double scale = norm2(a.normal);
    if (!(scale > 0.0)) throw PreconditionError("certify_surrounding: zero normal");
    const double off = pair(a.normal, pts[a.point]) - a.offset;
    if (std::abs(off) > tol * scale) {
      out.failed_condition = 1;
      out.reason = "condition (1): point " + std::to_string(a.point) + " is not on its hyperplane (off by " +
                   std::to_string(off / scale) + ")";
      return out;
    }
    if (support_value(k, a.normal) > a.offset + tol * scale) {
      out.failed_condition = 2;
      out.reason = "condition (2): K is not contained in the halfspace assigned to point " + std::to_string(a.point);
      return out;
    }
    normals.push_back(a.normal / scale);
  }
  const HullMembership hull = zero_in_convex_hull(normals);
  if (!hull.contains) {
    out.failed_condition = 3;
    out.reason = "condition (3): the origin is not in the convex hull of the assigned normals";
    return out;
  }
  NonFitCertificate cert;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const auto& a = assignment[i];
    const double scale = norm2(a.normal);
    cert.entries.push_back({a.point, a.normal / scale, a.offset / scale, hull.weights[i], a.facet});
  }
  out.certificate = std::move(cert);
  return out;
}

SurroundingCheck certify_surrounding(const Polytope& k, const std::vector<Vector>& pts,
                                     const std::vector<std::size_t>& facets, double tol) {
  if (facets.size() != pts.size()) throw PreconditionError("certify_surrounding: one facet per point expected");
  std::vector<Assignment> a;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (facets[i] >= k.num_facets()) throw PreconditionError("certify_surrounding: facet index out of range");
    a.push_back({i, k.facet(facets[i]).normal, k.facet(facets[i]).offset, facets[i]});
  }
  return certify_surrounding(k, pts, a, tol);
}

SurroundingCheck revalidate(const Polytope& k, const std::vector<Vector>& pts, const FitResult& fit) {
  if (fit.fits) throw PreconditionError("revalidate: the points fit; there is no certificate");
  std::vector<Halfspace> grown;
  for (const auto& h : k.facets()) grown.push_back({h.normal, h.offset - fit.slack});
  const Polytope big = Polytope::from_hrep(grown);
  std::vector<Vector> moved;
  for (const auto& q : pts) moved.push_back(q - fit.translation);
  std::vector<Assignment> a;
  for (const auto& e : fit.certificate.entries) a.push_back({e.point, e.normal, e.offset, e.facet});
  return certify_surrounding(big, moved, a, 1e-7);
}

}  // namespace billiards
