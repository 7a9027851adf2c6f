#include "billiards/body.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace billiards {

namespace {

constexpr double kDuplicateTol = 1e-9;

// Calls f on every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool same_point(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  return (a - b).lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()));
}

}  // namespace

Halfspace Halfspace::normalized() const {
  const double n = norm2(normal);
  if (!(n > 0.0)) throw GeometryError("halfspace with zero normal");
  return {normal / n, offset / n};
}

Polytope Polytope::from_hrep(std::vector<Halfspace> input) {
  if (input.empty()) throw GeometryError("empty halfspace system");
  const int d = input.front().normal.dim();
  if (d < 1) throw GeometryError("dimension must be positive");
  for (const auto& h : input) {
    if (h.normal.dim() != d) throw GeometryError("halfspaces have mixed dimensions");
    if (!h.normal.is_finite() || !std::isfinite(h.offset)) throw GeometryError("non-finite halfspace data");
  }

  // Normalize and merge parallel duplicates, keeping the tighter offset.
  std::vector<Halfspace> hs;
  for (const auto& raw : input) {
    const Halfspace h = raw.normalized();
    auto it = std::find_if(hs.begin(), hs.end(), [&](const Halfspace& o) {
      return same_point(o.normal.coords(), h.normal.coords(), kDuplicateTol);
    });
    if (it == hs.end())
      hs.push_back(h);
    else
      it->offset = std::min(it->offset, h.offset);
  }

  std::vector<Covector> normals;
  for (const auto& h : hs) normals.push_back(h.normal);
  if (hs.size() < static_cast<std::size_t>(d) + 1 || !zero_in_convex_hull(normals).interior)
    throw GeometryError("halfspace system is unbounded (normals do not positively span the space)");

  // Chebyshev ball: maximize r s.t. <a_j, x> + r <= b_j.
  {
    LpProblem lp;
    lp.objective.assign(static_cast<std::size_t>(d) + 1, 0.0);
    lp.objective[static_cast<std::size_t>(d)] = 1.0;
    for (const auto& h : hs) {
      std::vector<double> row = h.normal.to_std();
      row.push_back(1.0);
      lp.add(std::move(row), Relation::LessEqual, h.offset);
    }
    const LpOutcome o = solve_lp(lp);
    if (o.status != LpStatus::Optimal) throw GeometryError("Chebyshev LP failed: " + to_string(o.status));
    const double r = o.primal[static_cast<std::size_t>(d)];
    if (r < -tol::feas) throw GeometryError("halfspace system is empty");
    if (r <= tol::boundary) throw GeometryError("halfspace system is lower-dimensional (no interior)");
  }

  // Redundancy removal: drop j when max <a_j, x> over the others stays within b_j.
  for (std::size_t j = 0; j < hs.size();) {
    LpProblem lp;
    lp.objective = hs[j].normal.to_std();
    for (std::size_t i = 0; i < hs.size(); ++i) {
      if (i == j) continue;
      lp.add(hs[i].normal.to_std(), Relation::LessEqual, hs[i].offset);
    }
    lp.add(hs[j].normal.to_std(), Relation::LessEqual, hs[j].offset + 1.0);
    const LpOutcome o = solve_lp(lp);
    if (o.status == LpStatus::Optimal && o.objective <= hs[j].offset + tol::feas)
      hs.erase(hs.begin() + static_cast<std::ptrdiff_t>(j));
    else
      ++j;
  }

  Polytope k;
  k.dim_ = d;
  k.facets_ = hs;

  // Vertices from d-subsets of facets.
  const auto du = static_cast<std::size_t>(d);
  for_each_subset(hs.size(), du, [&](const std::vector<std::size_t>& s) {
    Matrix a(d, d);
    Eigen::VectorXd b(d);
    for (std::size_t r = 0; r < du; ++r) {
      a.row(static_cast<Eigen::Index>(r)) = hs[s[r]].normal.coords().transpose();
      b[static_cast<Eigen::Index>(r)] = hs[s[r]].offset;
    }
    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(1e-10);
    if (lu.rank() < d) return;
    const Vector x(lu.solve(b));
    for (const auto& h : hs)
      if (h.violation(x) > tol::feas * std::max(1.0, std::abs(h.offset))) return;
    for (const auto& v : k.vertices_)
      if (same_point(v.coords(), x.coords(), kDuplicateTol)) return;
    k.vertices_.push_back(x);
  });

  k.incidence_.resize(hs.size());
  for (std::size_t j = 0; j < hs.size(); ++j) {
    for (std::size_t v = 0; v < k.vertices_.size(); ++v)
      if (std::abs(hs[j].violation(k.vertices_[v])) <= tol::boundary) k.incidence_[j].push_back(v);
    if (k.incidence_[j].size() < du) throw GeometryError("facet " + std::to_string(j) + " touches fewer than d vertices");
  }

  // Recompute the Chebyshev ball on the irredundant system for the stored center.
  LpProblem lp;
  lp.objective.assign(du + 1, 0.0);
  lp.objective[du] = 1.0;
  for (const auto& h : hs) {
    std::vector<double> row = h.normal.to_std();
    row.push_back(1.0);
    lp.add(std::move(row), Relation::LessEqual, h.offset);
  }
  const LpOutcome o = solve_lp(lp);
  k.center_ = Vector(std::vector<double>(o.primal.begin(), o.primal.begin() + d));
  k.inradius_ = o.primal[du];
  return k;
}

Polytope Polytope::from_vrep(const std::vector<Vector>& input) {
  if (input.empty()) throw GeometryError("empty vertex list");
  const int d = input.front().dim();
  std::vector<Vector> pts;
  for (const auto& p : input) {
    if (p.dim() != d) throw GeometryError("points have mixed dimensions");
    if (!p.is_finite()) throw GeometryError("non-finite point");
    if (std::none_of(pts.begin(), pts.end(), [&](const Vector& q) { return same_point(q.coords(), p.coords(), kDuplicateTol); }))
      pts.push_back(p);
  }
  Matrix diffs(d, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) diffs.col(static_cast<Eigen::Index>(i)) = pts[i].coords() - pts[0].coords();
  if (numerical_rank(diffs) < d) throw GeometryError("points are affinely degenerate (lower-dimensional hull)");

  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, p.coords().lpNorm<Eigen::Infinity>());
  const double side_tol = 1e-9 * scale;

  std::vector<Halfspace> hs;
  for_each_subset(pts.size(), static_cast<std::size_t>(d), [&](const std::vector<std::size_t>& s) {
    Matrix rows(d - 1, d);
    for (int r = 1; r < d; ++r) rows.row(r - 1) = (pts[s[static_cast<std::size_t>(r)]].coords() - pts[s[0]].coords()).transpose();
    const Matrix ns = null_space(rows);
    if (ns.cols() != 1) return;
    Covector n(Eigen::VectorXd(ns.col(0)));
    double off = pair(n, pts[s[0]]);
    bool below = true, above = true;
    for (const auto& p : pts) {
      const double v = pair(n, p) - off;
      if (v > side_tol) below = false;
      if (v < -side_tol) above = false;
    }
    if (!below && !above) return;
    if (!below) {
      n = -n;
      off = -off;
    }
    const Halfspace h{n, off};
    if (std::none_of(hs.begin(), hs.end(), [&](const Halfspace& o) {
          return same_point(o.normal.coords(), h.normal.coords(), kDuplicateTol);
        }))
      hs.push_back(h);
  });
  return from_hrep(std::move(hs));
}

double Polytope::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) best = std::max(best, norm2(vertices_[i] - vertices_[j]));
  return best;
}

Vector Polytope::facet_centroid(std::size_t j) const {
  Vector c = Vector::zero(dim_);
  const auto& vs = incidence_.at(j);
  for (std::size_t v : vs) c += vertices_[v];
  return c / static_cast<double>(vs.size());
}

bool Polytope::contains(const Vector& x, double tol) const {
  return std::all_of(facets_.begin(), facets_.end(), [&](const Halfspace& h) { return h.violation(x) <= tol; });
}

FaceRef active_facets(const Polytope& k, const Vector& q, double tol) {
  if (q.dim() != k.dim()) throw DimensionMismatch("active_facets: point dimension differs from body");
  FaceRef f;
  for (std::size_t j = 0; j < k.num_facets(); ++j) {
    const double v = k.facet(j).violation(q);
    if (v > tol) throw PreconditionError("point lies outside the body (facet " + std::to_string(j) + " violated by " + std::to_string(v) + ")");
    if (std::abs(v) <= tol) f.active_facets.push_back(j);
  }
  return f;
}

double support_value(const Polytope& k, const Covector& n) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : k.vertices()) best = std::max(best, pair(n, v));
  return best;
}

std::vector<Face> low_dimensional_faces(const Polytope& k) {
  // Faces are closed under intersection; start from facets and intersect until stable.
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::vector<std::size_t>> frontier;
  for (std::size_t j = 0; j < k.num_facets(); ++j) {
    if (seen.insert(k.facet_vertices(j)).second) frontier.push_back(k.facet_vertices(j));
  }
  while (!frontier.empty()) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& f : frontier) {
      for (std::size_t j = 0; j < k.num_facets(); ++j) {
        std::vector<std::size_t> meet;
        const auto& fv = k.facet_vertices(j);
        std::set_intersection(f.begin(), f.end(), fv.begin(), fv.end(), std::back_inserter(meet));
        if (meet.empty() || meet.size() == f.size()) continue;
        if (seen.insert(meet).second) next.push_back(meet);
      }
    }
    frontier = std::move(next);
  }

  std::vector<Face> faces;
  for (const auto& vs : seen) {
    Face f;
    f.vertices = vs;
    Matrix diffs(k.dim(), static_cast<Eigen::Index>(vs.size()));
    for (std::size_t i = 0; i < vs.size(); ++i)
      diffs.col(static_cast<Eigen::Index>(i)) = k.vertices()[vs[i]].coords() - k.vertices()[vs[0]].coords();
    f.dim = numerical_rank(diffs);
    if (f.dim > k.dim() - 2) continue;
    for (std::size_t j = 0; j < k.num_facets(); ++j) {
      const auto& fv = k.facet_vertices(j);
      if (std::includes(fv.begin(), fv.end(), vs.begin(), vs.end())) f.facets.push_back(j);
    }
    faces.push_back(std::move(f));
  }
  std::sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) {
    return a.dim != b.dim ? a.dim < b.dim : a.vertices < b.vertices;
  });
  return faces;
}

Polytope transformed(const Polytope& k, const Matrix& a, const Vector& t) {
  if (a.rows() != k.dim() || a.cols() != k.dim()) throw DimensionMismatch("transformed: matrix size");
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw PreconditionError("transformed: singular matrix");
  const Matrix inv_t = lu.inverse().transpose();
  // {y : <a_j, A^{-1}(y - t)> <= b_j}  =  {y : <A^{-T} a_j, y> <= b_j + <A^{-T} a_j, t>}
  std::vector<Halfspace> hs;
  for (const auto& h : k.facets()) {
    const Covector n(Eigen::VectorXd(inv_t * h.normal.coords()));
    hs.push_back({n, h.offset + pair(n, t)});
  }
  return Polytope::from_hrep(std::move(hs));
}

Polytope scaled(const Polytope& k, double factor) {
  if (!(factor > 0.0)) throw PreconditionError("scaled: factor must be positive");
  return transformed(k, factor * Matrix::Identity(k.dim(), k.dim()), Vector::zero(k.dim()));
}

Polytope translated(const Polytope& k, const Vector& t) {
  return transformed(k, Matrix::Identity(k.dim(), k.dim()), t);
}

}  // namespace billiards
