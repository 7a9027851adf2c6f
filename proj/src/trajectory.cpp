#include "billiards/trajectory.hpp"

#include <algorithm>
#include <numbers>

#include "billiards/cones.hpp"

namespace billiards {

namespace {

double scale_of(const ClosedPolyline& q) {
  double s = 1.0;
  for (const auto& v : q.vertices) s = std::max(s, v.coords().lpNorm<Eigen::Infinity>());
  return s;
}

bool same_direction(const Vector& u, const Vector& w, double tol) {
  const double nu = norm2(u), nw = norm2(w);
  if (nu == 0.0 || nw == 0.0) return false;
  const double c = dot(u, w) / (nu * nw);
  return c > 0.0 && 1.0 - c <= 0.5 * tol * tol;
}

Vector reflect(const Vector& x, const Covector& n, double offset) {
  const double s = (pair(n, x) - offset) / dot(n, n);
  return x - 2.0 * s * as_vector(n);
}

}  // namespace

double TrajectoryReport::max_residual() const {
  double r = 0.0;
  for (const auto& b : bounces) r = std::max(r, b.law_residual);
  return r;
}

double length(const ClosedPolyline& q, const NormBody& t) {
  double l = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) l += norm_eval(t, q.next(i) - q.at(i));
  return l;
}

ClosedPolyline normalize(const ClosedPolyline& q, double tol) {
  if (q.size() < 2) throw PreconditionError("normalize: a closed polyline needs at least two vertices");
  const double abs_tol = tol * scale_of(q);
  std::vector<Vector> v = q.vertices;
  bool changed = true;
  while (changed && v.size() >= 2) {
    changed = false;
    // coinciding consecutive vertices
    for (std::size_t i = 0; i < v.size() && v.size() >= 2; ++i) {
      const std::size_t j = (i + 1) % v.size();
      if (norm2(v[i] - v[j]) <= abs_tol) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
        break;
      }
    }
    if (changed) continue;
    if (v.size() < 3) break;
    // vertices interior to a straight run
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vector& a = v[(i + v.size() - 1) % v.size()];
      const Vector& b = v[(i + 1) % v.size()];
      if (same_direction(v[i] - a, b - v[i], std::max(tol, 1e-12))) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (v.size() < 2) throw PreconditionError("normalize: all vertices coincide");
  return ClosedPolyline{std::move(v)};
}

std::vector<std::size_t> find_return_points(const ClosedPolyline& q, double tol) {
  if (q.size() < 3) throw PreconditionError("find_return_points: needs at least three vertices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (norm2(q.prev(i) - q.next(i)) <= tol) out.push_back(i);
  return out;
}

TrajectoryReport verify(const Polytope& k, const NormBody& t, const ClosedPolyline& q, double tol, double law_tol) {
  if (q.size() < 2) throw PreconditionError("verify: a closed polyline needs at least two vertices");
  TrajectoryReport rep;
  rep.length = length(q, t);
  rep.valid = true;
  rep.classical = true;
  for (std::size_t i = 0; i < q.size(); ++i) {
    BounceReport b;
    b.point = q.at(i);
    const Vector u = q.at(i) - q.prev(i);
    const Vector w = q.next(i) - q.at(i);
    if (!(norm2(u) > 0.0) || !(norm2(w) > 0.0)) throw PreconditionError("verify: polyline is not normalized");
    b.momentum_in = momentum(t, u);
    b.momentum_out = momentum(t, w);
    const Covector diff = b.momentum_in - b.momentum_out;

    bool outside = false;
    for (std::size_t j = 0; j < k.num_facets(); ++j) {
      const double v = k.facet(j).violation(b.point);
      if (v > tol) outside = true;
      if (std::abs(v) <= tol) b.active_facets.push_back(j);
    }
    b.on_boundary = !outside && !b.active_facets.empty();
    if (b.active_facets.empty()) {
      b.law_residual = norm2(diff);
      b.normal = Covector::zero(k.dim());
    } else {
      Matrix g(k.dim(), static_cast<Eigen::Index>(b.active_facets.size()));
      for (std::size_t c = 0; c < b.active_facets.size(); ++c)
        g.col(static_cast<Eigen::Index>(c)) = k.facet(b.active_facets[c]).normal.coords();
      const NnlsResult fit = nonneg_least_squares(g, diff.coords());
      const Covector proj(Eigen::VectorXd(g * Eigen::Map<const Eigen::VectorXd>(fit.weights.data(), g.cols())));
      b.law_residual = fit.residual;
      b.lambda = norm2(proj);
      b.normal = b.lambda > 0.0 ? proj / b.lambda : Covector::zero(k.dim());
    }
    b.classical = b.on_boundary && b.active_facets.size() == 1;
    rep.valid = rep.valid && b.on_boundary && b.law_residual <= law_tol;
    rep.classical = rep.classical && b.classical;
    rep.bounces.push_back(std::move(b));
  }
  rep.classical = rep.classical && rep.valid;
  return rep;
}

Vector slide_point(const NormBody& t, const Vector& a, const Vector& b, const Halfspace& h, const Vector& hint) {
  // |v|_T = <c, v> + |L^T v| with W = L L^T; the <c, .> part is constant along a -> r -> b.
  const Matrix w = t.metric();
  const Eigen::LLT<Matrix> llt(w);
  const Matrix lt = llt.matrixU();  // L^T
  auto fwd = [&](const Vector& x) { return Eigen::VectorXd(lt * x.coords()); };
  const Eigen::VectorXd n = llt.matrixL().solve(h.normal.coords());  // L^{-1} a
  const double beta = h.offset;

  const Eigen::VectorXd pa = fwd(a), pb = fwd(b);
  const double nn = n.squaredNorm();
  const double sa = n.dot(pa) - beta;
  double sb = n.dot(pb) - beta;
  Eigen::VectorXd pr = pb;
  const double eps = 1e-15 * std::max({1.0, pa.norm(), pb.norm()}) * std::sqrt(nn);
  Eigen::VectorXd r;
  if (std::abs(sa) <= eps && std::abs(sb) <= eps) {
    // Both on the hyperplane: every point of [a, b] is optimal; take the one nearest the hint.
    const Eigen::VectorXd ph = fwd(hint);
    const Eigen::VectorXd ab = pb - pa;
    const double den = ab.squaredNorm();
    const double s = den > 0.0 ? std::clamp((ph - pa).dot(ab) / den, 0.0, 1.0) : 0.0;
    r = pa + s * ab;
  } else {
    if (sa * sb > 0.0) {
      pr = pb - (2.0 * sb / nn) * n;
      sb = -sb;
    }
    const double s = sa / (sa - sb);
    r = pa + s * (pr - pa);
    r -= ((n.dot(r) - beta) / nn) * n;  // land exactly on the hyperplane
  }
  return Vector(Eigen::VectorXd(lt.triangularView<Eigen::Upper>().solve(r)));
}

ClosedPolyline slide_move(const Polytope& k, const NormBody& t, std::size_t i, const ClosedPolyline& q,
                          const Halfspace& h) {
  if (i >= q.size()) throw PreconditionError("slide_move: vertex index out of range");
  if (q.size() < 2) throw PreconditionError("slide_move: a closed polyline needs at least two vertices");
  const double scale = norm2(h.normal);
  if (!(scale > 0.0)) throw PreconditionError("slide_move: zero hyperplane normal");
  const double tol = tol::boundary * std::max(1.0, k.diameter());
  if (std::abs(support_value(k, h.normal) - h.offset) > tol * scale)
    throw PreconditionError("slide_move: hyperplane does not support K");
  const Vector& a = q.prev(i);
  const Vector& b = q.next(i);
  if (h.violation(a) > tol * scale || h.violation(b) > tol * scale)
    throw PreconditionError("slide_move: a neighbor is cut off by the hyperplane");
  ClosedPolyline out = q;
  const Vector r = slide_point(t, a, b, h, q.at(i));
  // Never lengthen (a hint-selected or degenerate r may tie).
  const double before = norm_eval(t, q.at(i) - a) + norm_eval(t, b - q.at(i));
  const double after = norm_eval(t, r - a) + norm_eval(t, b - r);
  if (after <= before) out.vertices[i] = r;
  return out;
}

AcuteMove acute_shortening_move(const Polytope& k, std::size_t i, const ClosedPolyline& q) {
  if (i >= q.size()) throw PreconditionError("acute_shortening_move: vertex index out of range");
  const Vector& qi = q.at(i);
  const FaceRef face = active_facets(k, qi);
  if (face.classification() != PointClass::NonSmoothBoundary)
    throw PreconditionError("acute_shortening_move: vertex is not a non-smooth boundary point");
  const Vector& a = q.prev(i);
  const Vector& b = q.next(i);
  const Vector u = qi - a, w = b - qi;
  if (!(norm2(u) > 0.0) || !(norm2(w) > 0.0)) throw PreconditionError("acute_shortening_move: polyline is not normalized");

  AcuteMove out;
  const int d = k.dim();
  const NormalCone ncone = normal_cone(k, qi);
  const TangentCone tcone = tangent_cone(k, qi);
  Matrix g(d, static_cast<Eigen::Index>(ncone.generators.size()));
  for (std::size_t c = 0; c < ncone.generators.size(); ++c) g.col(static_cast<Eigen::Index>(c)) = ncone.generators[c].coords();

  // Reflection normal: the point of N_K(q) nearest the momentum difference.
  const Covector diff = as_covector(u) / norm2(u) - as_covector(w) / norm2(w);
  const NnlsResult fit = nonneg_least_squares(g, diff.coords());
  const Covector proj(Eigen::VectorXd(g * Eigen::Map<const Eigen::VectorXd>(fit.weights.data(), g.cols())));
  if (!(norm2(proj) > 1e-12)) {
    out.reason = "momentum difference has no component in the normal cone";
    return out;
  }
  const Covector n = normalized(proj);
  out.normal = n;

  // Candidate planes through n: spanned with each extreme ray (the whole hull when d = 2).
  const Matrix lin = column_span(g);
  std::vector<Covector> seconds;
  for (const auto& gen : ncone.generators) seconds.push_back(gen);
  if (lin.cols() == 2) seconds.emplace_back(Eigen::VectorXd(lin.col(0) + lin.col(1)));
  const double threshold = std::numbers::pi / 2.0 + tol::angle;
  PlanarSection best;
  bool found = false;
  for (const auto& c : seconds) {
    Covector perp = c - dot(c, n) * n;
    if (norm2(perp) <= 1e-9) continue;
    const PlanarSection s = planar_section(tcone, n, perp);
    if (s.width() > threshold && s.lo < -1e-9 && s.hi > 1e-9 && (!found || s.width() > best.width() + 1e-12)) {
      best = s;
      found = true;
    }
  }
  if (!found) {
    out.reason = "no planar section of the normal cone through the reflection normal is obtuse";
    return out;
  }
  out.section_width = best.width();

  // e2 of the section plane: the lo side has a negative e2 component.
  const Covector e2 = normalized(best.side_hi - dot(best.side_hi, n) * n);
  const bool a_high = pair(e2, a - qi) >= 0.0;
  const Covector n1 = a_high ? best.side_hi : best.side_lo;
  const Covector n2 = a_high ? best.side_lo : best.side_hi;
  out.side_a = n1;
  out.side_b = n2;
  // n = alpha n1 + beta n2 inside the plane.
  Eigen::Matrix2d basis;
  basis << dot(n1, n), dot(n2, n), dot(n1, e2), dot(n2, e2);
  const Eigen::Vector2d coef = basis.colPivHouseholderQr().solve(Eigen::Vector2d(1.0, 0.0));
  out.weight_a = coef[0];
  out.weight_b = coef[1];

  const double off1 = pair(n1, qi), off2 = pair(n2, qi);
  const Vector a2 = reflect(a, n1, off1);
  const Vector b2 = reflect(b, n2, off2);
  const Vector dir = b2 - a2;
  const double den1 = pair(n1, dir), den2 = pair(n2, dir);
  if (std::abs(den1) < 1e-14 || std::abs(den2) < 1e-14) {
    out.reason = "reflected segment is parallel to a side hyperplane";
    return out;
  }
  const double s1 = (off1 - pair(n1, a2)) / den1;
  const double s2 = (off2 - pair(n2, a2)) / den2;
  if (!(s1 >= -1e-12 && s1 <= s2 + 1e-12 && s2 <= 1.0 + 1e-12)) {
    out.reason = "reflected segment meets the side hyperplanes out of order";
    return out;
  }
  const Vector q1 = a2 + s1 * dir;
  const Vector q2 = a2 + s2 * dir;
  const double before = norm2(u) + norm2(w);
  const double after = norm2(q1 - a) + norm2(q2 - q1) + norm2(b - q2);
  if (!(after < before)) {
    out.reason = "replacement is not shorter";
    return out;
  }
  out.applied = true;
  out.polyline = q;
  out.polyline.vertices[i] = q1;
  out.polyline.vertices.insert(out.polyline.vertices.begin() + static_cast<std::ptrdiff_t>(i) + 1, q2);
  return out;
}

}  // namespace billiards
