#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "billiards/body.hpp"
#include "billiards/norm.hpp"
#include "billiards/trajectory.hpp"

namespace testing {

using namespace billiards;

inline const double kSqrt3 = std::sqrt(3.0);

inline Polytope equilateral() { return Polytope::from_vrep({Vector{0, 0}, Vector{1, 0}, Vector{0.5, kSqrt3 / 2}}); }
inline Polytope unit_square() { return Polytope::from_vrep({Vector{0, 0}, Vector{1, 0}, Vector{1, 1}, Vector{0, 1}}); }
inline Polytope right_isoceles() { return Polytope::from_vrep({Vector{0, 0}, Vector{1, 0}, Vector{0, 1}}); }
inline Polytope obtuse() { return Polytope::from_vrep({Vector{0, 0}, Vector{3, 0}, Vector{0.5, 0.6}}); }
inline Polytope pentagon() {
  return Polytope::from_vrep({Vector{0, 0}, Vector{2, 0}, Vector{2.4, 1.1}, Vector{1.1, 2.0}, Vector{-0.3, 1.2}});
}
inline Polytope hexagon() {
  std::vector<Vector> vs;
  for (int k = 0; k < 6; ++k) vs.push_back(Vector{std::cos(k * M_PI / 3), std::sin(k * M_PI / 3)});
  return Polytope::from_vrep(vs);
}
inline Polytope tetrahedron() {
  return Polytope::from_vrep(
      {Vector{0, 0, 0}, Vector{1, 0, 0}, Vector{0.5, kSqrt3 / 2, 0}, Vector{0.5, kSqrt3 / 6, std::sqrt(6.0) / 3}});
}
inline Polytope cube() {
  std::vector<Vector> vs;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) vs.push_back(Vector{double(x), double(y), double(z)});
  return Polytope::from_vrep(vs);
}

struct Named {
  std::string name;
  Polytope body;
};

inline std::vector<Named> planar_fixtures() {
  return {{"equilateral", equilateral()}, {"square", unit_square()}, {"right isoceles", right_isoceles()},
          {"obtuse", obtuse()},           {"pentagon", pentagon()},  {"hexagon", hexagon()}};
}

inline NormBody planar_ellipsoid() {
  Matrix m(2, 2);
  m << 1.5, 0.3, 0.3, 0.8;
  return NormBody::ellipsoid(m, Covector{0.2, -0.1});
}

inline NormBody spatial_ellipsoid() {
  Matrix m(3, 3);
  m << 1.4, 0.2, -0.1, 0.2, 0.9, 0.15, -0.1, 0.15, 1.1;
  return NormBody::ellipsoid(m, Covector{0.1, -0.15, 0.05});
}

/// Index of the facet whose unit normal is closest to n.
inline std::size_t facet_with_normal(const Polytope& k, const Covector& n) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < k.num_facets(); ++j)
    if (norm2(k.facet(j).normal - normalized(n)) < norm2(k.facet(best).normal - normalized(n))) best = j;
  return best;
}

/// max over the vertex list of <n, v>.
inline double support_by_vertices(const Polytope& k, const Covector& n) {
  double best = -1e300;
  for (const auto& v : k.vertices()) best = std::max(best, pair(n, v));
  return best;
}

/// |v|_T for an ellipsoid T by dense sampling of its boundary (2-D), or of random
/// boundary directions (any d).
inline double sampled_ellipsoid_norm(const Matrix& m, const Covector& c, const Vector& v, int samples = 200000) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Matrix root_inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                          es.eigenvectors().transpose();
  const int d = v.dim();
  double best = -1e300;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd u(d);
    if (d == 2) {
      const double a = 2 * M_PI * s / samples;
      u << std::cos(a), std::sin(a);
    } else {
      for (int i = 0; i < d; ++i) u[i] = g(rng);
      u.normalize();
    }
    const Eigen::VectorXd p = c.coords() + root_inv * u;
    best = std::max(best, p.dot(v.coords()));
  }
  return best;
}

/// Uniform point on facet j (random convex combination of its vertices).
inline Vector random_facet_point(const Polytope& k, std::size_t j, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& idx = k.facet_vertices(j);
  std::vector<double> w;
  double total = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    w.push_back(-std::log(1.0 - u(rng)));
    total += w.back();
  }
  Vector p = Vector::zero(k.dim());
  for (std::size_t i = 0; i < idx.size(); ++i) p += (w[i] / total) * k.vertices()[idx[i]];
  return p;
}

/// Random matrix with singular values in [0.5, 2].
inline Matrix random_well_conditioned(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> s(0.5, 2.0);
  Matrix a(d, d), b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      a(i, j) = g(rng);
      b(i, j) = g(rng);
    }
  const Matrix q1 = Eigen::HouseholderQR<Matrix>(a).householderQ();
  const Matrix q2 = Eigen::HouseholderQR<Matrix>(b).householderQ();
  Eigen::VectorXd sv(d);
  for (int i = 0; i < d; ++i) sv[i] = s(rng);
  return q1 * sv.asDiagonal() * q2;
}

/// Random simplex near the regular one: vertices perturbed by up to `jitter`.
inline Polytope near_regular_simplex(int d, double jitter, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-jitter, jitter);
  std::vector<Vector> vs;
  if (d == 2) {
    for (int k = 0; k < 3; ++k) vs.push_back(Vector{std::cos(2 * M_PI * k / 3), std::sin(2 * M_PI * k / 3)});
  } else {
    vs = {Vector{1, 1, 1}, Vector{1, -1, -1}, Vector{-1, 1, -1}, Vector{-1, -1, 1}};
  }
  for (auto& v : vs)
    for (int i = 0; i < d; ++i) v[i] += u(rng);
  return Polytope::from_vrep(vs);
}

}  // namespace testing
