#include "billiards/solver.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "billiards/cones.hpp"

namespace billiards {

// ---------------------------------------------------------------------------
// Facet sequences

FacetSequence FacetSequence::canonical(std::vector<std::size_t> cyc) {
  const std::size_t m = cyc.size();
  std::vector<std::size_t> best = cyc, cand(m);
  for (int dir = 0; dir < 2; ++dir) {
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t i = 0; i < m; ++i) cand[i] = cyc[(r + i) % m];
      if (cand < best) best = cand;
    }
    std::reverse(cyc.begin(), cyc.end());
  }
  return FacetSequence{std::move(best)};
}

bool sequence_less(const FacetSequence& a, const FacetSequence& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.indices < b.indices;
}

std::vector<FacetSequence> enumerate_sequences(const Polytope& k) {
  const std::size_t nf = k.num_facets();
  const std::size_t max_m = static_cast<std::size_t>(k.dim()) + 1;
  std::map<std::vector<std::size_t>, bool> hull_cache;
  auto hull_ok = [&](const std::vector<std::size_t>& seq) {
    std::vector<std::size_t> key = seq;
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    auto it = hull_cache.find(key);
    if (it != hull_cache.end()) return it->second;
    std::vector<Covector> normals;
    for (auto j : key) normals.push_back(k.facet(j).normal);
    const bool ok = zero_in_convex_hull(normals).contains;
    hull_cache.emplace(std::move(key), ok);
    return ok;
  };

  std::vector<FacetSequence> out;
  for (std::size_t m = 2; m <= max_m; ++m) {
    std::vector<std::size_t> cyc(m, 0);
    while (true) {
      bool repeats = false;
      for (std::size_t i = 0; i < m; ++i)
        if (cyc[i] == cyc[(i + 1) % m]) repeats = true;
      if (!repeats && FacetSequence::canonical(cyc).indices == cyc && hull_ok(cyc)) out.push_back(FacetSequence{cyc});
      std::size_t pos = m;
      while (pos > 0 && ++cyc[pos - 1] == nf) cyc[--pos] = 0;
      if (pos == 0) break;
    }
  }
  std::sort(out.begin(), out.end(), sequence_less);
  return out;
}

// ---------------------------------------------------------------------------
// Inner minimization over a fixed cycle of hyperplanes

namespace {

// Coordinates x~ = L^T x in which |v|_T = <c, v> + |v~|.  The <c, .> part telescopes
// around a closed polyline, so cycle lengths are Euclidean in these coordinates.
struct Frame {
  Eigen::LLT<Matrix> llt;
  Matrix lt;
  explicit Frame(const NormBody& t) : llt(t.metric()), lt(llt.matrixU()) {}
  Eigen::VectorXd to(const Vector& x) const { return lt * x.coords(); }
  Vector from(const Eigen::VectorXd& y) const {
    return Vector(Eigen::VectorXd(lt.triangularView<Eigen::Upper>().solve(y)));
  }
  Eigen::VectorXd normal(const Covector& a) const { return llt.matrixL().solve(a.coords()); }
};

// q_i = o_i + B_i y_i with B_i an orthonormal basis of hyperplane i.
struct CycleProblem {
  int m = 0, k = 0;
  std::vector<Eigen::VectorXd> normal;
  std::vector<double> offset;
  std::vector<Eigen::VectorXd> origin;
  std::vector<Matrix> basis;

  Eigen::VectorXd point(const Eigen::VectorXd& y, int i) const {
    return origin[i] + basis[i] * y.segment(static_cast<Eigen::Index>(i) * k, k);
  }

  double value(const Eigen::VectorXd& y, double delta) const {
    double f = 0.0;
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd e = point(y, (i + 1) % m) - point(y, i);
      f += std::sqrt(e.squaredNorm() + delta * delta);
    }
    return f;
  }

  void derivatives(const Eigen::VectorXd& y, double delta, Eigen::VectorXd& g, Matrix& h) const {
    const Eigen::Index n = static_cast<Eigen::Index>(m) * k;
    g.setZero(n);
    h.setZero(n, n);
    for (int i = 0; i < m; ++i) {
      const int j = (i + 1) % m;
      const Eigen::VectorXd e = point(y, j) - point(y, i);
      const double phi = std::sqrt(e.squaredNorm() + delta * delta);
      if (!(phi > 0.0)) continue;
      const Eigen::VectorXd ge = e / phi;
      const Matrix he = (Matrix::Identity(e.size(), e.size()) - ge * ge.transpose()) / phi;
      const Eigen::Index si = static_cast<Eigen::Index>(i) * k, sj = static_cast<Eigen::Index>(j) * k;
      g.segment(sj, k) += basis[j].transpose() * ge;
      g.segment(si, k) -= basis[i].transpose() * ge;
      h.block(sj, sj, k, k) += basis[j].transpose() * he * basis[j];
      h.block(si, si, k, k) += basis[i].transpose() * he * basis[i];
      h.block(si, sj, k, k) -= basis[i].transpose() * he * basis[j];
      h.block(sj, si, k, k) -= basis[j].transpose() * he * basis[i];
    }
  }
};

// Damped Newton on the smoothed objective sum sqrt(|e|^2 + delta^2) for a decreasing
// sequence of delta.
void newton_continuation(const CycleProblem& p, Eigen::VectorXd& y) {
  const Eigen::Index n = y.size();
  if (n == 0) return;
  const double scale = std::max(p.value(y, 0.0) / p.m, 1e-300);
  Eigen::VectorXd g;
  Matrix h;
  for (double delta = 1e-2 * scale; delta >= 1e-13 * scale; delta *= 0.1) {
    for (int it = 0; it < 100; ++it) {
      p.derivatives(y, delta, g, h);
      if (g.norm() <= 1e-14) break;
      const double f = p.value(y, delta);
      double mu = 1e-14 * (1.0 + h.diagonal().cwiseAbs().maxCoeff());
      Eigen::VectorXd step;
      for (int tries = 0; tries < 20; ++tries) {
        Eigen::LDLT<Matrix> ldlt(h + mu * Matrix::Identity(n, n));
        if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
          step = ldlt.solve(-g);
          if (step.allFinite()) break;
        }
        mu *= 100.0;
      }
      double slope = g.dot(step);
      if (step.size() != n || !(slope < 0.0)) {
        step = -g;
        slope = -g.squaredNorm();
      }
      double alpha = 1.0;
      bool accepted = false;
      while (alpha > 1e-20) {
        const Eigen::VectorXd trial = y + alpha * step;
        if (p.value(trial, delta) <= f + 1e-4 * alpha * slope) {
          y = trial;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted || alpha * step.norm() <= 1e-15 * (1.0 + y.norm())) break;
    }
  }
}

}  // namespace

CycleResult min_cycle_on_hyperplanes(const std::vector<Halfspace>& hs, const NormBody& t,
                                     const std::vector<Vector>& init) {
  if (hs.size() < 2) throw PreconditionError("min_cycle_on_hyperplanes: at least two hyperplanes required");
  if (!init.empty() && init.size() != hs.size())
    throw PreconditionError("min_cycle_on_hyperplanes: one initial point per hyperplane expected");
  const int d = t.dim();
  for (const auto& h : hs) {
    if (h.normal.dim() != d) throw DimensionMismatch("min_cycle_on_hyperplanes: hyperplane dimension differs from norm");
    if (!(norm2(h.normal) > 0.0)) throw PreconditionError("min_cycle_on_hyperplanes: zero normal");
  }
  const Frame frame(t);
  const int m = static_cast<int>(hs.size());

  CycleProblem p;
  p.m = m;
  p.k = d - 1;
  for (const auto& h : hs) {
    Eigen::VectorXd n = frame.normal(h.normal);
    const double len = n.norm();
    n /= len;
    p.normal.push_back(n);
    p.offset.push_back(h.offset / len);
    p.origin.push_back(n * (h.offset / len));
    p.basis.push_back(null_space(Matrix(n.transpose())));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m) * p.k);
  if (!init.empty())
    for (int i = 0; i < m; ++i)
      y.segment(static_cast<Eigen::Index>(i) * p.k, p.k) = p.basis[i].transpose() * (frame.to(init[i]) - p.origin[i]);
  newton_continuation(p, y);

  // Exact single-point slides until the cycle stops improving.
  std::vector<Vector> x;
  for (int i = 0; i < m; ++i) x.emplace_back(p.point(y, i));
  const NormBody flat = NormBody::euclidean(d);
  auto cycle_length = [&] {
    double l = 0.0;
    for (int i = 0; i < m; ++i) l += norm2(x[(i + 1) % m] - x[i]);
    return l;
  };
  CycleResult out;
  double cur = cycle_length();
  constexpr int kMaxSweeps = 1000;
  for (out.sweeps = 0; out.sweeps < kMaxSweeps; ++out.sweeps) {
    for (int i = 0; i < m; ++i) {
      const Vector& a = x[(i + m - 1) % m];
      const Vector& b = x[(i + 1) % m];
      const Vector r = slide_point(flat, a, b, Halfspace{Covector(p.normal[i]), p.offset[i]}, x[i]);
      if (norm2(r - a) + norm2(b - r) <= norm2(x[i] - a) + norm2(b - x[i])) x[i] = r;
    }
    const double next = cycle_length();
    const double gain = cur - next;
    cur = next;
    if (gain <= 1e-12 * std::max(cur, 1e-300)) {
      out.converged = true;
      ++out.sweeps;
      break;
    }
  }
  for (const auto& xi : x) out.points.push_back(frame.from(xi.coords()));
  out.length = length(ClosedPolyline{out.points}, t);
  return out;
}

// ---------------------------------------------------------------------------
// Global solver

namespace {

std::vector<Halfspace> sequence_planes(const Polytope& k, const FacetSequence& s) {
  std::vector<Halfspace> hs;
  for (auto j : s.indices) hs.push_back(k.facet(j));
  return hs;
}

// Translation t moving every point into K (up to tol) along directions annihilated by
// every covector in `keep`.  Returns nullopt if no such translation exists.
std::optional<Vector> repair_translation(const Polytope& k, const std::vector<Vector>& pts,
                                         const std::vector<Covector>& keep, double tol) {
  const int d = k.dim();
  const auto du = static_cast<std::size_t>(d);
  LpProblem lp;
  lp.objective.assign(du + 1, 0.0);
  lp.objective[du] = 1.0;
  for (const auto& q : pts)
    for (const auto& h : k.facets()) {
      std::vector<double> row(du + 1);
      for (std::size_t r = 0; r < du; ++r) row[r] = h.normal[static_cast<int>(r)];
      row[du] = 1.0;
      lp.add(std::move(row), Relation::LessEqual, h.offset - pair(h.normal, q));
    }
  for (const auto& n : keep) {
    std::vector<double> row(du + 1, 0.0);
    for (std::size_t r = 0; r < du; ++r) row[r] = n[static_cast<int>(r)];
    lp.add(std::move(row), Relation::Equal, 0.0);
  }
  // Keeps the objective bounded when every point has room to spare.
  lp.add([&] {
    std::vector<double> row(du + 1, 0.0);
    row[du] = 1.0;
    return row;
  }(), Relation::LessEqual, 0.0);
  const LpOutcome o = solve_lp(lp);
  if (o.status != LpStatus::Optimal || o.primal[du] < -tol) return std::nullopt;
  return Vector(std::vector<double>(o.primal.begin(), o.primal.begin() + d));
}

// Snaps runs of (nearly) coincident consecutive points to one point on the
// intersection of their hyperplanes.
void merge_clusters(const Polytope& k, const FacetSequence& s, std::vector<Vector>& pts, double tol) {
  const std::size_t m = pts.size();
  std::size_t start = m;
  for (std::size_t i = 0; i < m; ++i)
    if (norm2(pts[(i + 1) % m] - pts[i]) > tol) {
      start = (i + 1) % m;
      break;
    }
  if (start == m) throw VerificationError("shortest_trajectory: the minimizing cycle collapsed to a point");
  std::size_t i = 0;
  while (i < m) {
    std::vector<std::size_t> run{(start + i) % m};
    while (i + run.size() < m && norm2(pts[(start + i + run.size()) % m] - pts[run.back()]) <= tol)
      run.push_back((start + i + run.size()) % m);
    if (run.size() > 1) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(k.dim());
      for (auto r : run) mean += pts[r].coords();
      mean /= static_cast<double>(run.size());
      Matrix a(static_cast<Eigen::Index>(run.size()), k.dim());
      Eigen::VectorXd b(static_cast<Eigen::Index>(run.size()));
      for (std::size_t r = 0; r < run.size(); ++r) {
        const Halfspace& h = k.facet(s.indices[run[r]]);
        a.row(static_cast<Eigen::Index>(r)) = h.normal.coords().transpose();
        b[static_cast<Eigen::Index>(r)] = h.offset;
      }
      const Eigen::VectorXd fix = a.completeOrthogonalDecomposition().solve(Eigen::VectorXd(b - a * mean));
      const Vector snapped(Eigen::VectorXd(mean + fix));
      for (auto r : run) pts[r] = snapped;
    }
    i += run.size();
  }
}

std::size_t nearest_vertex(const ClosedPolyline& q, const Vector& x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i)
    if (norm2(q.at(i) - x) < norm2(q.at(best) - x)) best = i;
  return best;
}

}  // namespace

SolveResult shortest_trajectory(const Polytope& k, const NormBody& t) {
  if (!t.is_smooth()) throw PreconditionError("shortest_trajectory: the norm body must be Euclidean or an ellipsoid");
  if (t.dim() != k.dim()) throw DimensionMismatch("shortest_trajectory: body and norm dimensions differ");
  const std::vector<FacetSequence> seqs = enumerate_sequences(k);
  if (seqs.empty()) throw GeometryError("shortest_trajectory: no facet sequence surrounds the origin");

  std::vector<CycleResult> cycles;
  cycles.reserve(seqs.size());
  std::size_t best = 0;
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    std::vector<Vector> init;
    for (auto j : seqs[s].indices) init.push_back(k.facet_centroid(j));
    cycles.push_back(min_cycle_on_hyperplanes(sequence_planes(k, seqs[s]), t, init));
    if (cycles[s].length < cycles[best].length - 1e-9 * (1.0 + cycles[best].length)) best = s;
  }

  SolveResult out;
  out.sequence = seqs[best];
  out.sequences_tried = seqs.size();
  out.runner_up_gap = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < seqs.size(); ++s)
    if (s != best) out.runner_up_gap = std::min(out.runner_up_gap, cycles[s].length - cycles[best].length);

  const double scale = std::max(1.0, k.diameter());
  const double tol = tol::boundary * scale;
  std::vector<Vector> pts = cycles[best].points;
  bool outside = false;
  for (const auto& q : pts)
    if (!k.contains(q, tol)) outside = true;
  if (outside) {
    std::vector<Covector> keep;
    for (auto j : out.sequence.indices) keep.push_back(k.facet(j).normal);
    auto shift = repair_translation(k, pts, keep, tol);
    if (!shift) shift = repair_translation(k, pts, {}, tol);
    if (shift)
      for (auto& q : pts) q += *shift;
  }
  merge_clusters(k, out.sequence, pts, tol);
  out.trajectory = normalize(ClosedPolyline{pts});
  out.xi = length(out.trajectory, t);
  out.report = verify(k, t, out.trajectory);

  if (!out.report.valid) {
    std::size_t off = 0;
    for (const auto& b : out.report.bounces) off += b.on_boundary ? 0 : 1;
    throw VerificationError("shortest_trajectory: optimum failed verification (max law residual " +
                            std::to_string(out.report.max_residual()) + ", " + std::to_string(off) +
                            " vertices off the boundary)");
  }

  std::vector<Assignment> assignment;
  for (std::size_t i = 0; i < out.sequence.size(); ++i) {
    const std::size_t j = out.sequence.indices[i];
    assignment.push_back({nearest_vertex(out.trajectory, pts[i]), k.facet(j).normal, k.facet(j).offset, j});
  }
  SurroundingCheck cert = certify_surrounding(k, out.trajectory.vertices, assignment);
  if (!cert) {
    const FitResult fit = fits_into_interior(k, out.trajectory.vertices);
    if (!fit.fits) cert = revalidate(k, out.trajectory.vertices, fit);
  }
  if (!cert) throw VerificationError("shortest_trajectory: certificate failed: " + cert.reason);
  out.certificate = std::move(*cert.certificate);

  const std::size_t m = out.trajectory.size();
  if (m == static_cast<std::size_t>(k.dim()) + 1 && !out.report.classical)
    throw VerificationError("shortest_trajectory: a d+1 bounce optimum is not classical");
  if (m >= 3 && !find_return_points(out.trajectory, 1e-9 * scale).empty())
    throw VerificationError("shortest_trajectory: optimum contains a return point");
  if (!(out.xi > 0.0)) throw VerificationError("shortest_trajectory: non-positive length");
  return out;
}

// ---------------------------------------------------------------------------
// Local improvement

namespace {

class Improver {
 public:
  Improver(const Polytope& k, const NormBody& t, std::vector<Vector> pts, std::vector<Halfspace> hs)
      : k_(k), t_(t), pts_(std::move(pts)), hs_(std::move(hs)), scale_(std::max(1.0, k.diameter())) {
    best_ = length(ClosedPolyline{pts_}, t_);
  }

  void run() {
    for (int round = 0; round < 200; ++round) {
      if (slide() || drop_return() || (supports_k() && (reassign() || acute()))) continue;
      break;
    }
  }

  const std::vector<Vector>& points() const { return pts_; }

 private:
  bool hull_ok(const std::vector<Halfspace>& hs) const {
    std::vector<Covector> ns;
    for (const auto& h : hs) ns.push_back(h.normal);
    return zero_in_convex_hull(ns).contains;
  }

  bool supports_k() const {
    for (const auto& h : hs_)
      if (std::abs(support_value(k_, h.normal) - h.offset) > tol::boundary * scale_) return false;
    return true;
  }

  double threshold() const { return 1e-12 * std::max(1.0, best_); }

  // Minimizes over the given hyperplanes and adopts the result if it is shorter.
  bool try_accept(std::vector<Vector> pts, std::vector<Halfspace> hs) {
    if (!hull_ok(hs)) return false;
    const CycleResult c = min_cycle_on_hyperplanes(hs, t_, pts);
    const double start = length(ClosedPolyline{pts}, t_);
    if (c.length < start) {
      pts = c.points;
    }
    const double l = std::min(c.length, start);
    if (!(l < best_ - threshold())) return false;
    // Flat optima may leave K; slide back along the common kernel of the normals.
    if (std::any_of(pts.begin(), pts.end(), [&](const Vector& x) { return !k_.contains(x); })) {
      std::vector<Covector> keep;
      for (const auto& h : hs) keep.push_back(h.normal);
      if (auto shift = repair_translation(k_, pts, keep, tol::boundary * scale_))
        for (auto& x : pts) x += *shift;
    }
    pts_ = std::move(pts);
    hs_ = std::move(hs);
    best_ = l;
    return true;
  }

  bool slide() { return try_accept(pts_, hs_); }

  bool drop_return() {
    if (pts_.size() < 3) return false;
    for (auto i : find_return_points(ClosedPolyline{pts_}, 1e-9 * scale_)) {
      auto pts = pts_;
      auto hs = hs_;
      pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
      hs.erase(hs.begin() + static_cast<std::ptrdiff_t>(i));
      if (try_accept(std::move(pts), std::move(hs))) return true;
    }
    return false;
  }

  bool reassign() {
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (!k_.contains(pts_[i])) continue;
      const FaceRef face = active_facets(k_, pts_[i]);
      for (auto j : face.active_facets) {
        const Halfspace& f = k_.facet(j);
        if (norm2(f.normal - hs_[i].normal) < 1e-12) continue;
        auto hs = hs_;
        hs[i] = f;
        if (try_accept(pts_, std::move(hs))) return true;
      }
      for (auto j1 : face.active_facets)
        for (auto j2 : face.active_facets) {
          if (j1 == j2) continue;
          auto pts = pts_;
          auto hs = hs_;
          hs[i] = k_.facet(j1);
          pts.insert(pts.begin() + static_cast<std::ptrdiff_t>(i) + 1, pts_[i]);
          hs.insert(hs.begin() + static_cast<std::ptrdiff_t>(i) + 1, k_.facet(j2));
          if (try_accept(std::move(pts), std::move(hs))) return true;
        }
    }
    return false;
  }

  bool acute() {
    if (!t_.is_euclidean()) return false;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (!k_.contains(pts_[i])) continue;
      if (active_facets(k_, pts_[i]).classification() != PointClass::NonSmoothBoundary) continue;
      const ClosedPolyline q{pts_};
      if (norm2(q.prev(i) - q.at(i)) <= 0.0 || norm2(q.next(i) - q.at(i)) <= 0.0) continue;
      const AcuteMove mv = acute_shortening_move(k_, i, q);
      if (!mv.applied) continue;
      auto hs = hs_;
      hs[i] = Halfspace{mv.side_a, pair(mv.side_a, pts_[i])};
      hs.insert(hs.begin() + static_cast<std::ptrdiff_t>(i) + 1, Halfspace{mv.side_b, pair(mv.side_b, pts_[i])});
      if (try_accept(mv.polyline.vertices, std::move(hs))) return true;
    }
    return false;
  }

  const Polytope& k_;
  const NormBody& t_;
  std::vector<Vector> pts_;
  std::vector<Halfspace> hs_;
  double scale_;
  double best_ = 0.0;
};

}  // namespace

ClosedPolyline local_improve(const Polytope& k, const NormBody& t, const ClosedPolyline& q) {
  if (!t.is_smooth()) throw PreconditionError("local_improve: the norm body must be Euclidean or an ellipsoid");
  if (q.size() < 2) throw PreconditionError("local_improve: a closed polyline needs at least two vertices");
  const FitResult fit = fits_into_interior(k, q.vertices);
  if (fit.fits) throw PreconditionError("local_improve: the polyline fits into the interior of a translate of K");

  // One support halfspace per certificate point, through the point itself (a support
  // halfspace of a translate of the enlarged body).  Unused vertices are dropped.
  std::vector<Covector> acc(q.size(), Covector::zero(k.dim()));
  std::vector<bool> used(q.size(), false);
  for (const auto& e : fit.certificate.entries) {
    acc[e.point] += e.weight * e.normal;
    used[e.point] = true;
  }
  std::vector<Vector> pts;
  std::vector<Halfspace> hs;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!used[i] || !(norm2(acc[i]) > 1e-12)) continue;
    const Covector n = normalized(acc[i]);
    pts.push_back(q.vertices[i]);
    hs.push_back({n, pair(n, q.vertices[i])});
  }
  if (pts.size() < 2) throw NumericalError("local_improve: degenerate non-fit certificate");

  Improver imp(k, t, pts, hs);
  imp.run();
  const ClosedPolyline out = normalize(ClosedPolyline{imp.points()});
  // Dropping vertices only shortens, but keep the input when nothing was gained.
  return length(out, t) <= length(q, t) ? out : q;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace {

void add_unique(std::vector<Vector>& pts, const Vector& p, double tol) {
  for (const auto& q : pts)
    if (norm2(q - p) <= tol) return;
  pts.push_back(p);
}

std::vector<Vector> ordered_facet_polygon(const Polytope& k, std::size_t j) {
  std::vector<Vector> vs;
  for (auto v : k.facet_vertices(j)) vs.push_back(k.vertices()[v]);
  const Vector c = k.facet_centroid(j);
  const Matrix basis = null_space(Matrix(k.facet(j).normal.coords().transpose()));
  std::vector<std::pair<double, std::size_t>> ang;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Eigen::VectorXd uv = basis.transpose() * (vs[i] - c).coords();
    ang.emplace_back(std::atan2(uv[1], uv[0]), i);
  }
  std::sort(ang.begin(), ang.end());
  std::vector<Vector> out;
  for (const auto& [a, i] : ang) out.push_back(vs[i]);
  return out;
}

double facet_measure(const Polytope& k, std::size_t j) {
  if (k.dim() == 2) {
    const auto& fv = k.facet_vertices(j);
    return norm2(k.vertices()[fv[0]] - k.vertices()[fv[1]]);
  }
  const auto poly = ordered_facet_polygon(k, j);
  double area = 0.0;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const Eigen::Vector3d u = (poly[i] - poly[0]).coords(), w = (poly[i + 1] - poly[0]).coords();
    area += 0.5 * u.cross(w).norm();
  }
  return area;
}

std::vector<Vector> boundary_samples(const Polytope& k, double h) {
  const double dedup = 1e-9 * std::max(1.0, k.diameter());
  std::vector<Vector> out;
  for (std::size_t j = 0; j < k.num_facets(); ++j) {
    if (k.dim() == 2) {
      const auto& fv = k.facet_vertices(j);
      const Vector& a = k.vertices()[fv[0]];
      const Vector& b = k.vertices()[fv[1]];
      const int n = std::max(1, static_cast<int>(std::ceil(norm2(b - a) / h)));
      for (int s = 0; s <= n; ++s) add_unique(out, a + (static_cast<double>(s) / n) * (b - a), dedup);
      continue;
    }
    const auto poly = ordered_facet_polygon(k, j);
    for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
      const Vector &a = poly[0], &b = poly[i], &c = poly[i + 1];
      const double edge = std::max({norm2(b - a), norm2(c - b), norm2(a - c)});
      const int n = std::max(1, static_cast<int>(std::ceil(edge / h)));
      for (int u = 0; u <= n; ++u)
        for (int v = 0; u + v <= n; ++v) {
          const double wu = static_cast<double>(u) / n, wv = static_cast<double>(v) / n;
          add_unique(out, (1.0 - wu - wv) * a + wu * b + wv * c, dedup);
        }
    }
  }
  return out;
}

// Cyclic orders of m labelled points up to rotation (both orientations kept).
const std::vector<std::vector<int>>& cyclic_orders(std::size_t m) {
  static const std::vector<std::vector<int>> two{{0, 1}};
  static const std::vector<std::vector<int>> three{{0, 1, 2}, {0, 2, 1}};
  static const std::vector<std::vector<int>> four{{0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 1, 3},
                                                  {0, 2, 3, 1}, {0, 3, 1, 2}, {0, 3, 2, 1}};
  return m == 2 ? two : m == 3 ? three : four;
}

struct Candidate {
  double length = 0.0;
  std::array<std::uint16_t, 4> idx{};
  std::uint8_t m = 0;
};

class PatternSearch {
 public:
  PatternSearch(const Polytope& k, const NormBody& t, BruteForceResult& stats)
      : k_(k), t_(t), stats_(stats), scale_(std::max(1.0, k.diameter())) {}

  bool member(const std::vector<Vector>& pts) {
    // Points inside a ball of the inradius fit trivially.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(k_.dim());
    for (const auto& p : pts) mean += p.coords();
    mean /= static_cast<double>(pts.size());
    double spread = 0.0;
    for (const auto& p : pts) spread = std::max(spread, (p.coords() - mean).norm());
    if (spread < k_.inradius() * (1.0 - 1e-9)) return false;
    ++stats_.fit_tests;
    return in_P_m(k_, pts);
  }

  double refine(std::vector<Vector>& pts, double coarse, double grid, double& drift) {
    const std::vector<Vector> start = pts;
    double cur = length(ClosedPolyline{pts}, t_);
    for (double s = coarse; s >= grid * (1.0 - 1e-12); s *= 0.5) {
      for (int it = 0; it < 2000; ++it)
        if (!improve_once(pts, s, cur)) break;
    }
    drift = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) drift = std::max(drift, norm2(pts[i] - start[i]));
    return cur;
  }

 private:
  std::vector<Vector> directions(const Vector& p) const {
    std::vector<Vector> out;
    for (auto j : active_facets(k_, p, 1e-9 * scale_).active_facets) {
      const Matrix b = null_space(Matrix(k_.facet(j).normal.coords().transpose()));
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        out.emplace_back(Eigen::VectorXd(b.col(c)));
        out.emplace_back(Eigen::VectorXd(-b.col(c)));
      }
    }
    return out;
  }

  // Moves p by up to s along u without leaving K.
  std::optional<Vector> step(const Vector& p, const Vector& u, double s) const {
    double reach = s;
    for (const auto& h : k_.facets()) {
      const double au = pair(h.normal, u);
      if (au > 1e-12) reach = std::min(reach, std::max(0.0, (h.offset - pair(h.normal, p)) / au));
    }
    if (reach <= 1e-15 * scale_) return std::nullopt;
    return p + reach * u;
  }

  bool accept(std::vector<Vector>& pts, std::vector<Vector> cand, double& cur) {
    const double l = length(ClosedPolyline{cand}, t_);
    if (!(l < cur - 1e-14 * cur) || !member(cand)) return false;
    pts = std::move(cand);
    cur = l;
    return true;
  }

  bool improve_once(std::vector<Vector>& pts, double s, double& cur) {
    std::vector<std::vector<Vector>> dirs;
    for (const auto& p : pts) dirs.push_back(directions(p));
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (const auto& u : dirs[i]) {
        auto np = step(pts[i], u, s);
        if (!np) continue;
        auto cand = pts;
        cand[i] = *np;
        if (accept(pts, std::move(cand), cur)) return true;
      }
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        for (const auto& u : dirs[i])
          for (const auto& w : dirs[j]) {
            auto ni = step(pts[i], u, s);
            auto nj = step(pts[j], w, s);
            if (!ni || !nj) continue;
            auto cand = pts;
            cand[i] = *ni;
            cand[j] = *nj;
            if (accept(pts, std::move(cand), cur)) return true;
          }
    return false;
  }

  const Polytope& k_;
  const NormBody& t_;
  BruteForceResult& stats_;
  double scale_;
};

}  // namespace

BruteForceResult brute_force_xi(const Polytope& k, const NormBody& t, double grid) {
  const int d = k.dim();
  if (d != 2 && d != 3) throw PreconditionError("brute_force_xi: only d = 2 and d = 3 are supported");
  if (t.dim() != d) throw DimensionMismatch("brute_force_xi: body and norm dimensions differ");
  if (!(grid > 0.0)) throw PreconditionError("brute_force_xi: grid must be positive");

  double measure = 0.0;
  for (std::size_t j = 0; j < k.num_facets(); ++j) measure += facet_measure(k, j);
  double coarse = std::max(grid, d == 2 ? measure / 72.0 : std::sqrt(measure / 40.0));
  std::vector<Vector> samples = boundary_samples(k, coarse);
  const std::size_t cap = d == 2 ? 160 : 60;
  while (samples.size() > cap) {
    coarse *= 1.25;
    samples = boundary_samples(k, coarse);
  }
  const std::size_t n = samples.size();

  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) dist[i * n + j] = norm_eval(t, samples[j] - samples[i]);

  std::vector<Candidate> cands;
  const std::size_t max_m = static_cast<std::size_t>(d) + 1;
  std::array<std::size_t, 4> c{};
  auto emit = [&](std::size_t m) {
    for (const auto& ord : cyclic_orders(m)) {
      Candidate cd;
      cd.m = static_cast<std::uint8_t>(m);
      for (std::size_t r = 0; r < m; ++r) cd.idx[r] = static_cast<std::uint16_t>(c[static_cast<std::size_t>(ord[r])]);
      for (std::size_t r = 0; r < m; ++r) cd.length += dist[cd.idx[r] * n + cd.idx[(r + 1) % m]];
      cands.push_back(cd);
    }
  };
  for (c[0] = 0; c[0] < n; ++c[0])
    for (c[1] = c[0] + 1; c[1] < n; ++c[1]) {
      emit(2);
      if (max_m < 3) continue;
      for (c[2] = c[1] + 1; c[2] < n; ++c[2]) {
        emit(3);
        if (max_m < 4) continue;
        for (c[3] = c[2] + 1; c[3] < n; ++c[3]) emit(4);
      }
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.length < b.length; });

  BruteForceResult out;
  out.xi = std::numeric_limits<double>::infinity();
  PatternSearch search(k, t, out);
  constexpr std::size_t kRefined = 6;
  std::size_t found = 0;
  for (const auto& cd : cands) {
    if (found == kRefined) break;
    std::vector<Vector> pts;
    for (std::size_t r = 0; r < cd.m; ++r) pts.push_back(samples[cd.idx[r]]);
    if (!search.member(pts)) continue;
    ++found;
    double drift = 0.0;
    const double l = search.refine(pts, coarse, grid, drift);
    if (l < out.xi) {
      out.xi = l;
      out.polyline = ClosedPolyline{pts};
      out.resolution_warning = drift > coarse;
    }
  }
  if (found == 0) throw NumericalError("brute_force_xi: no sampled polyline avoids fitting into K");
  return out;
}

}  // namespace billiards
