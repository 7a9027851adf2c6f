// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "billiards/cones.hpp"
#include "billiards/containment.hpp"
#include "billiards/solver.hpp"
#include "support.hpp"

using namespace billiards;
using namespace testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

// Interior dihedral angle at the ridge shared by the facets opposite vertices i and j.
double dihedral_from_vertices(const std::vector<Vector>& vs, std::size_t i, std::size_t j) {
  const int d = vs.front().dim();
  std::vector<std::size_t> common;
  for (std::size_t r = 0; r < vs.size(); ++r)
    if (r != i && r != j) common.push_back(r);
  const Vector& base = vs[common[0]];
  Matrix span(d, static_cast<Eigen::Index>(common.size()) - 1);
  for (std::size_t r = 1; r < common.size(); ++r) span.col(static_cast<Eigen::Index>(r) - 1) = (vs[common[r]] - base).coords();
  auto perp = [&](const Vector& x) {
    Eigen::VectorXd v = (x - base).coords();
    if (span.cols() > 0) {
      const Matrix q = Eigen::HouseholderQR<Matrix>(span).householderQ() * Matrix::Identity(d, span.cols());
      v -= q * (q.transpose() * v);
    }
    return v;
  };
  const Eigen::VectorXd u = perp(vs[i]), w = perp(vs[j]);
  return std::acos(std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0));
}

double widest_dihedral(const Polytope& s) {
  double widest = 0.0;
  for (std::size_t i = 0; i < s.vertices().size(); ++i)
    for (std::size_t j = i + 1; j < s.vertices().size(); ++j) widest = std::max(widest, dihedral_from_vertices(s.vertices(), i, j));
  return widest;
}

// [1] Equilateral triangle: xi = 3/2 from the orthic triangle.
void equilateral_case(Verdict& v) {
  const Polytope k = equilateral();
  const NormBody e = NormBody::euclidean(2);
  const auto t0 = Clock::now();
  const SolveResult s = shortest_trajectory(k, e);
  const double elapsed = seconds_since(t0);
  const BruteForceResult bf = brute_force_xi(k, e, 1e-3);
  v.detail << "xi=" << s.xi << " oracle=" << bf.xi << " time=" << elapsed << "s";
  v.require(std::abs(s.xi - 1.5) <= 1e-6, "xi");
  v.require(s.trajectory.size() == 3 && s.report.classical, "three classical bounces");
  v.require(std::abs(bf.xi - s.xi) <= 5e-3, "oracle");
  v.require(elapsed < 1.0, "time");
}

// [2] Unit square: xi = 2 from a width bounce.
void square_case(Verdict& v) {
  const SolveResult s = shortest_trajectory(unit_square(), NormBody::euclidean(2));
  v.detail << "xi=" << s.xi << " bounces=" << s.trajectory.size();
  v.require(std::abs(s.xi - 2.0) <= 1e-6, "xi");
  v.require(s.trajectory.size() == 2 && s.report.valid, "two-bounce trajectory");
}

// [3] Right isoceles triangle: generalized minimizer into the right-angle corner.
void right_case(Verdict& v) {
  const Polytope k = right_isoceles();
  const NormBody e = NormBody::euclidean(2);
  const SolveResult s = shortest_trajectory(k, e);
  const BruteForceResult bf = brute_force_xi(k, e, 1e-3);
  v.detail << "xi=" << s.xi << " oracle=" << bf.xi << " classical=" << s.report.classical;
  v.require(std::abs(bf.xi - s.xi) <= 5e-3, "oracle");
  v.require(std::abs(s.xi - std::sqrt(2.0)) <= 1e-6, "xi = sqrt 2");
  v.require(s.report.valid && !s.report.classical, "generalized bounce");
}

// [4] Regular tetrahedron: four classical bounces; descent from random cycles.
void tetrahedron_case(Verdict& v) {
  const Polytope k = tetrahedron();
  const NormBody e = NormBody::euclidean(3);
  const auto t0 = Clock::now();
  const SolveResult s = shortest_trajectory(k, e);
  v.require(s.report.valid && s.report.classical && s.trajectory.size() == 4, "four classical bounces");
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    ClosedPolyline q;
    for (std::size_t j = 0; j < k.num_facets(); ++j) q.vertices.push_back(random_facet_point(k, j, rng));
    const ClosedPolyline end = local_improve(k, e, q);
    const double gap = length(end, e) - s.xi;
    worst = std::max(worst, std::abs(gap));
    v.require(length(end, e) <= length(q, e) + 1e-12, "descent lengthened");
  }
  const double elapsed = seconds_since(t0);
  v.detail << "xi=" << s.xi << " worst local gap=" << worst << " time=" << elapsed << "s";
  v.require(worst <= 1e-5, "local improvement gap");
  v.require(elapsed < 30.0, "time");
}

// [5] Acuteness on fixtures and random near-regular simplices.
void acuteness_case(Verdict& v) {
  v.require(is_acute_body(equilateral()).acute, "equilateral acute");
  v.require(is_acute_body(tetrahedron()).acute, "tetrahedron acute");
  for (const auto& k : {unit_square(), right_isoceles(), obtuse(), hexagon(), pentagon(), cube()})
    v.require(!is_acute_body(k).acute, "non-acute fixture");
  std::mt19937_64 rng(55);
  int accepted = 0, drawn = 0;
  while (accepted < 50) {
    ++drawn;
    const int d = 2 + accepted % 2;
    const Polytope s = near_regular_simplex(d, 0.25, rng);
    if (widest_dihedral(s) >= M_PI / 2 - 0.05) continue;
    ++accepted;
    v.require(is_acute_body(s).acute, "random simplex acute");
    const SolveResult r = shortest_trajectory(s, NormBody::euclidean(d));
    v.require(r.report.classical && r.trajectory.size() == static_cast<std::size_t>(d + 1), "random simplex classical");
  }
  v.detail << "simplices=" << accepted << " (drawn " << drawn << ")";
}

// [6] Homogeneity, translation, monotonicity, covariance, triangle inequality, certificates.
void property_case(Verdict& v) {
  const NormBody e = NormBody::euclidean(2);
  const NormBody ell = planar_ellipsoid();
  std::mt19937_64 rng(66);
  std::normal_distribution<double> g;
  double worst_cov = 0.0;
  for (const auto& [name, k] : planar_fixtures()) {
    for (const NormBody* t : {&e, &ell}) {
      const SolveResult base = shortest_trajectory(k, *t);
      v.require(static_cast<bool>(revalidate(k, base.trajectory.vertices, fits_into_interior(k, base.trajectory.vertices))),
                "certificate " + name);
      v.require(base.certificate.imbalance() < 1e-8, "certificate balance " + name);
      for (double lam : {0.5, 2.0, 3.7})
        v.require(std::abs(shortest_trajectory(scaled(k, lam), *t).xi - lam * base.xi) <= 1e-9 * lam * base.xi,
                  "homogeneity " + name);
      const Vector shift{g(rng), g(rng)};
      v.require(std::abs(shortest_trajectory(translated(k, shift), *t).xi - base.xi) <= 1e-9 * base.xi,
                "translation " + name);
    }
  }
  // Nested pairs: cut a fixture by a random halfplane through its interior.
  int nested = 0;
  while (nested < 10) {
    const auto fixtures = planar_fixtures();
    const Polytope& outer = fixtures[static_cast<std::size_t>(nested) % fixtures.size()].body;
    const Covector n = normalized(Covector{g(rng), g(rng)});
    const double off = pair(n, outer.chebyshev_center()) + 0.3 * outer.inradius() * std::abs(g(rng));
    std::vector<Halfspace> hs = outer.facets();
    hs.push_back({n, off});
    const Polytope inner = Polytope::from_hrep(hs);
    ++nested;
    v.require(shortest_trajectory(inner, e).xi <= shortest_trajectory(outer, e).xi + 1e-9, "monotonicity");
  }
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_well_conditioned(2, rng);
    const Polytope k = pentagon();
    for (const NormBody* t : {&e, &ell}) {
      const double image = shortest_trajectory(transformed(k, a, Vector{0, 0}), *t).xi;
      const double pulled = shortest_trajectory(k, transform_dual(*t, a)).xi;
      worst_cov = std::max(worst_cov, std::abs(image - pulled) / image);
    }
  }
  v.require(worst_cov <= 1e-8, "covariance");
  // The shortest trajectory never beats a 2-bounce across the minimal width, nor the
  // triangle inequality on its own vertices.
  for (const auto& [name, k] : planar_fixtures()) {
    const SolveResult s = shortest_trajectory(k, ell);
    for (std::size_t i = 0; i < s.trajectory.size(); ++i) {
      const Vector &a = s.trajectory.prev(i), &b = s.trajectory.at(i), &c = s.trajectory.next(i);
      if (s.trajectory.size() >= 3)
        v.require(norm_eval(ell, c - a) < norm_eval(ell, b - a) + norm_eval(ell, c - b), "strict triangle inequality");
    }
  }
  v.detail << "worst covariance error=" << worst_cov << " nested pairs=" << nested;
}

// [7] Acute shortening at generalized vertex bounces; slides never lengthen.
void moves_case(Verdict& v) {
  std::mt19937_64 rng(77);
  int shortened = 0;
  double least_gain = 1e300;
  while (shortened < 100) {
    const int d = shortened < 70 ? 2 : 3;
    const Polytope k = near_regular_simplex(d, 0.25, rng);
    if (widest_dihedral(k) >= M_PI / 2 - 0.05) continue;
    const std::size_t corner = static_cast<std::size_t>(shortened) % k.vertices().size();
    // Vertex to the foot of its altitude and back: perpendicular at the foot, and a
    // generalized bounce at the vertex.
    std::size_t opposite = 0;
    for (std::size_t j = 0; j < k.num_facets(); ++j)
      if (std::abs(k.facet(j).violation(k.vertices()[corner])) > 1e-9) opposite = j;
    const Vector& apex = k.vertices()[corner];
    const Halfspace& h = k.facet(opposite);
    const Vector foot = apex - Vector(Eigen::VectorXd(h.normal.coords() * h.violation(apex)));
    const ClosedPolyline q{{foot, apex}};
    const NormBody e = NormBody::euclidean(d);
    const TrajectoryReport rep = verify(k, e, q);
    v.require(rep.valid && !rep.bounces[1].classical, "generalized bounce at the vertex");
    const AcuteMove mv = acute_shortening_move(k, 1, q);
    ++shortened;
    v.require(mv.applied, "acute move applied");
    if (!mv.applied) continue;
    const double gain = length(q, e) - length(mv.polyline, e);
    least_gain = std::min(least_gain, gain);
    v.require(gain > 0.0, "strict decrease");
    v.require(!fits_into_interior(k, mv.polyline.vertices).fits, "still not fitting");
  }
  int slides = 0, refused = 0;
  double worst_increase = -1e300;
  std::vector<Polytope> bodies{pentagon(), hexagon(), obtuse(), tetrahedron(), cube()};
  std::uniform_int_distribution<std::size_t> pick(0, 1 << 20);
  for (int trial = 0; trial < 1000; ++trial) {
    const Polytope& k = bodies[static_cast<std::size_t>(trial) % bodies.size()];
    const NormBody t = k.dim() == 2 ? (trial % 2 ? NormBody::euclidean(2) : planar_ellipsoid())
                                    : (trial % 2 ? NormBody::euclidean(3) : spatial_ellipsoid());
    ClosedPolyline q;
    const std::size_t m = 2 + pick(rng) % static_cast<std::size_t>(k.dim());
    for (std::size_t i = 0; i < m; ++i) q.vertices.push_back(random_facet_point(k, pick(rng) % k.num_facets(), rng));
    const std::size_t i = pick(rng) % m;
    const auto active = active_facets(k, q.at(i)).active_facets;
    try {
      const ClosedPolyline moved = slide_move(k, t, i, q, k.facet(active[pick(rng) % active.size()]));
      ++slides;
      worst_increase = std::max(worst_increase, length(moved, t) - length(q, t));
    } catch (const PreconditionError&) {
      ++refused;
    }
  }
  v.require(worst_increase <= 1e-12, "slide lengthened");
  v.require(slides >= 500, "too few applicable slides");
  v.detail << "acute moves=" << shortened << " least gain=" << least_gain << " slides=" << slides
           << " refused=" << refused << " worst change=" << worst_increase;
}

// [8] Solver against the direct-search oracle on every planar fixture.
void oracle_case(Verdict& v) {
  const auto t0 = Clock::now();
  double worst_ratio = 0.0;
  const NormBody e = NormBody::euclidean(2);
  const NormBody ell = planar_ellipsoid();
  for (const auto& [name, k] : planar_fixtures()) {
    for (const NormBody* t : {&e, &ell}) {
      const double xi = shortest_trajectory(k, *t).xi;
      for (double grid : {1e-2, 1e-3}) {
        const BruteForceResult bf = brute_force_xi(k, *t, grid);
        const double diff = std::abs(bf.xi - xi);
        worst_ratio = std::max(worst_ratio, diff / grid);
        v.require(diff <= 5 * grid, "oracle " + name);
      }
    }
  }
  const double elapsed = seconds_since(t0);
  v.detail << "worst |diff|/grid=" << worst_ratio << " time=" << elapsed << "s";
  v.require(elapsed < 300.0, "time");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"equilateral triangle xi = 1.5", equilateral_case},
      {"unit square xi = 2", square_case},
      {"right isoceles triangle generalized minimizer", right_case},
      {"regular tetrahedron classical 4-bounce and local descent", tetrahedron_case},
      {"acuteness and classical minimizers in acute simplices", acuteness_case},
      {"homogeneity, translation, monotonicity, covariance, certificates", property_case},
      {"acute shortening and slide moves", moves_case},
      {"agreement with the direct-search oracle", oracle_case},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
