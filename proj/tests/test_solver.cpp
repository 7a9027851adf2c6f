#include <doctest.h>

#include <chrono>

#include "billiards/solver.hpp"
#include "support.hpp"

using namespace billiards;
using namespace testing;

namespace {

// Shortest closed billiard in a triangle: twice the least height, or the orthic triangle
// (perimeter 2 * area / circumradius) when all angles are acute.
double triangle_xi(const Polytope& k) {
  const auto& v = k.vertices();
  const double ab = norm2(v[1] - v[0]), bc = norm2(v[2] - v[1]), ca = norm2(v[0] - v[2]);
  const Eigen::VectorXd u = (v[1] - v[0]).coords(), w = (v[2] - v[0]).coords();
  const double area = 0.5 * std::abs(u[0] * w[1] - u[1] * w[0]);
  const double two_heights = 2 * 2 * area / std::max({ab, bc, ca});
  const bool acute = ab * ab + bc * bc > ca * ca && bc * bc + ca * ca > ab * ab && ca * ca + ab * ab > bc * bc;
  if (!acute) return two_heights;
  return std::min(two_heights, 2 * area / (ab * bc * ca / (4 * area)));
}

// Twice the minimal width, from the vertex list.
double twice_width(const Polytope& k) {
  double best = 1e300;
  for (const auto& f : k.facets()) best = std::min(best, support_by_vertices(k, f.normal) + support_by_vertices(k, -1.0 * f.normal));
  return 2 * best;
}

}  // namespace

TEST_CASE("canonical facet sequences") {
  const FacetSequence a = FacetSequence::canonical({2, 0, 1});
  const FacetSequence b = FacetSequence::canonical({1, 0, 2});
  const FacetSequence c = FacetSequence::canonical({0, 1, 2});
  CHECK(a == b);
  CHECK(a == c);
  CHECK(FacetSequence::canonical({3, 1, 2, 0}) == FacetSequence::canonical({0, 2, 1, 3}));
  CHECK_FALSE(FacetSequence::canonical({0, 1, 2, 3}) == FacetSequence::canonical({0, 2, 1, 3}));
  CHECK(sequence_less(FacetSequence::canonical({4, 5}), c));
}

TEST_CASE("sequence enumeration") {
  CHECK(enumerate_sequences(equilateral()).size() == 1);
  // Two opposite pairs plus the four triples that contain one.
  CHECK(enumerate_sequences(unit_square()).size() == 6);
  const auto seqs = enumerate_sequences(cube());
  for (std::size_t i = 1; i < seqs.size(); ++i) CHECK(sequence_less(seqs[i - 1], seqs[i]));
  for (const auto& s : seqs) {
    CHECK(FacetSequence::canonical(s.indices) == s);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.indices[i] != s.indices[(i + 1) % s.size()]);
  }
}

TEST_CASE("minimal cycles on hyperplanes") {
  const Polytope k = equilateral();
  const CycleResult r = min_cycle_on_hyperplanes(k.facets(), NormBody::euclidean(2));
  CHECK(r.converged);
  CHECK(r.length == doctest::Approx(1.5).epsilon(1e-9));
  const Polytope sq = unit_square();
  const CycleResult p = min_cycle_on_hyperplanes(
      {sq.facet(facet_with_normal(sq, Covector{1, 0})), sq.facet(facet_with_normal(sq, Covector{-1, 0}))},
      NormBody::euclidean(2));
  CHECK(p.length == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("shortest trajectories in triangles match the closed form") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const NormBody e = NormBody::euclidean(2);
  std::vector<Polytope> bodies{equilateral(), right_isoceles(), obtuse()};
  while (bodies.size() < 23) {
    const Vector a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    const Eigen::VectorXd ab = (b - a).coords(), ac = (c - a).coords();
    if (std::abs(ab[0] * ac[1] - ab[1] * ac[0]) > 0.2) bodies.push_back(Polytope::from_vrep({a, b, c}));
  }
  for (const auto& k : bodies) {
    const SolveResult s = shortest_trajectory(k, e);
    CHECK(s.xi == doctest::Approx(triangle_xi(k)).epsilon(1e-8));
    CHECK(s.report.valid);
    CHECK(s.certificate.imbalance() < 1e-8);
    CHECK(s.runner_up_gap >= 0.0);
  }
}

TEST_CASE("shortest trajectories in centrally symmetric bodies are width bounces") {
  const NormBody e2 = NormBody::euclidean(2);
  for (const auto& k : {unit_square(), hexagon(), Polytope::from_vrep({Vector{0, 0}, Vector{2, 0}, Vector{2.5, 1}, Vector{0.5, 1}})}) {
    const SolveResult s = shortest_trajectory(k, e2);
    CHECK(s.xi == doctest::Approx(twice_width(k)).epsilon(1e-8));
    CHECK(s.trajectory.size() == 2);
  }
  const SolveResult c = shortest_trajectory(cube(), NormBody::euclidean(3));
  CHECK(c.xi == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("regular tetrahedron: four classical bounces, bounded by direct search") {
  const SolveResult s = shortest_trajectory(tetrahedron(), NormBody::euclidean(3));
  CHECK(s.trajectory.size() == 4);
  CHECK(s.report.classical);
  const BruteForceResult bf = brute_force_xi(tetrahedron(), NormBody::euclidean(3), 1e-2);
  CHECK(bf.xi >= s.xi - 1e-9);
  CHECK(bf.xi - s.xi < 5e-2);
}

TEST_CASE("solver agrees with direct search for non-Euclidean norms") {
  const NormBody t = planar_ellipsoid();
  for (const auto& [name, k] : planar_fixtures()) {
    CAPTURE(name);
    const SolveResult s = shortest_trajectory(k, t);
    const BruteForceResult bf = brute_force_xi(k, t, 1e-3);
    CHECK(s.report.valid);
    CHECK(bf.xi >= s.xi - 1e-9);
    CHECK(bf.xi - s.xi <= 5e-3);
  }
}

TEST_CASE("linear covariance and shift invariance") {
  std::mt19937_64 rng(19);
  const Polytope k = pentagon();
  const NormBody e = NormBody::euclidean(2);
  for (int trial = 0; trial < 4; ++trial) {
    const Matrix a = random_well_conditioned(2, rng);
    const double image = shortest_trajectory(transformed(k, a, Vector{0.3, -0.2}), e).xi;
    const double pulled = shortest_trajectory(k, transform_dual(e, a)).xi;
    CHECK(image == doctest::Approx(pulled).epsilon(1e-8));
  }
  Matrix m(2, 2);
  m << 1.5, 0.3, 0.3, 0.8;
  CHECK(shortest_trajectory(k, planar_ellipsoid()).xi ==
        doctest::Approx(shortest_trajectory(k, NormBody::ellipsoid(m, Covector{0, 0})).xi).epsilon(1e-9));
  CHECK(shortest_trajectory(scaled(k, 2.5), e).xi == doctest::Approx(2.5 * shortest_trajectory(k, e).xi).epsilon(1e-9));
}

TEST_CASE("non-smooth norms are rejected by the solver") {
  const NormBody l1 = NormBody::dual_polytope({Covector{1, 0}, Covector{0, 1}, Covector{-1, 0}, Covector{0, -1}});
  CHECK_THROWS_AS(shortest_trajectory(unit_square(), l1), PreconditionError);
}

TEST_CASE("local improvement reaches the optimum from a vertex cycle") {
  const Polytope k = equilateral();
  const NormBody e = NormBody::euclidean(2);
  // The triangle of vertices does not fit into the interior.
  const ClosedPolyline start{k.vertices()};
  const ClosedPolyline end = local_improve(k, e, start);
  CHECK(length(end, e) == doctest::Approx(1.5).epsilon(1e-6));
  CHECK_FALSE(fits_into_interior(k, end.vertices).fits);
  // A 2-bounce from a corner to the opposite side.
  const ClosedPolyline apex{{Vector{0.5, kSqrt3 / 2}, Vector{0.5, 0}}};
  const ClosedPolyline improved = local_improve(k, e, apex);
  CHECK(length(improved, e) <= length(apex, e));
  CHECK(length(improved, e) == doctest::Approx(1.5).epsilon(1e-6));
  CHECK_THROWS_AS(local_improve(k, e, ClosedPolyline{{Vector{0.4, 0.2}, Vector{0.5, 0.3}}}), PreconditionError);
}

TEST_CASE("direct search is an upper bound with grid-level accuracy") {
  const NormBody e = NormBody::euclidean(2);
  for (const auto& [name, k] : planar_fixtures()) {
    CAPTURE(name);
    const auto t0 = std::chrono::steady_clock::now();
    const BruteForceResult bf = brute_force_xi(k, e, 1e-2);
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(20));
    CHECK(in_P_m(k, bf.polyline.vertices));
    CHECK(bf.xi == doctest::Approx(length(bf.polyline, e)));
    CHECK(bf.xi >= shortest_trajectory(k, e).xi - 1e-9);
  }
}

TEST_CASE("local improvement fixed point and return points") {
  const Polytope k = equilateral();
  const NormBody e = NormBody::euclidean(2);
  const ClosedPolyline orthic{{Vector{0.5, 0}, Vector{0.75, kSqrt3 / 4}, Vector{0.25, kSqrt3 / 4}}};
  CHECK(length(local_improve(k, e, orthic), e) == doctest::Approx(1.5).epsilon(1e-9));
  // Out to the apex and straight back, then to the left side.
  const Vector foot{0.5, 0}, apex{0.5, kSqrt3 / 2}, left{0.25, kSqrt3 / 4};
  const ClosedPolyline spike{{foot, apex, foot, left}};
  REQUIRE(find_return_points(spike).size() == 2);
  const ClosedPolyline improved = local_improve(k, e, spike);
  CHECK(length(improved, e) < length(spike, e) - 1e-6);
  CHECK(improved.size() < spike.size());
}

TEST_CASE("direct search scales with the body") {
  const NormBody e = NormBody::euclidean(2);
  const double grid = 1e-2;
  const double one = brute_force_xi(pentagon(), e, grid).xi;
  const double two = brute_force_xi(scaled(pentagon(), 2.0), e, grid).xi;
  CHECK(std::abs(two - 2 * one) <= 5 * 2 * grid);
}
