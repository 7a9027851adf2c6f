#include "billiards/cones.hpp"

#include <algorithm>
#include <numbers>
#include <random>

namespace billiards {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

template <class Elem>
Matrix as_columns(const std::vector<Elem>& xs, int d) {
  Matrix m(d, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = xs[i].coords();
  return m;
}

template <class Elem>
std::vector<Elem> unit_dedup(const std::vector<Elem>& xs) {
  std::vector<Elem> out;
  for (const auto& x : xs) {
    const double n = norm2(x);
    if (!(n > 1e-12)) continue;
    const Elem u = x / n;
    if (std::none_of(out.begin(), out.end(), [&](const Elem& o) { return norm2(o - u) <= 1e-9; })) out.push_back(u);
  }
  return out;
}

// x in cone(gens) by LP feasibility: lambda >= 0, G lambda = x.
bool in_cone_lp(const Matrix& gens, const Eigen::VectorXd& x) {
  const auto k = static_cast<std::size_t>(gens.cols());
  if (k == 0) return x.norm() <= 1e-9;
  LpProblem lp;
  lp.objective.assign(k, 0.0);
  lp.lower_bounds.assign(k, 0.0);
  for (Eigen::Index r = 0; r < gens.rows(); ++r) {
    std::vector<double> row(k);
    for (std::size_t c = 0; c < k; ++c) row[c] = gens(r, static_cast<Eigen::Index>(c));
    lp.add(std::move(row), Relation::Equal, x[r]);
  }
  return solve_lp(lp).status == LpStatus::Optimal;
}

double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
  }
  return r;
}

// Halton points with a seeded Cranley-Patterson rotation.
class Halton {
 public:
  Halton(int dims, std::uint64_t seed) : shift_(static_cast<std::size_t>(dims), 0.0) {
    if (seed != 0) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (double& s : shift_) s = u(rng);
    }
  }
  std::vector<double> point(std::uint64_t i) const {
    static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    std::vector<double> p(shift_.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double v = radical_inverse(i + 1, primes[k % 12]) + shift_[k];
      p[k] = v - std::floor(v);
    }
    return p;
  }

 private:
  std::vector<double> shift_;
};

}  // namespace

template <class Elem>
std::vector<Elem> extreme_rays(const std::vector<Elem>& generators) {
  std::vector<Elem> gens = unit_dedup(generators);
  if (gens.empty()) return gens;
  const int d = gens.front().dim();
  for (std::size_t i = 0; i < gens.size();) {
    std::vector<Elem> others;
    for (std::size_t j = 0; j < gens.size(); ++j)
      if (j != i) others.push_back(gens[j]);
    if (!others.empty() && in_cone_lp(as_columns(others, d), gens[i].coords()))
      gens.erase(gens.begin() + static_cast<std::ptrdiff_t>(i));
    else
      ++i;
  }
  return gens;
}

template <class Elem>
bool cone_contains(const Cone<Elem>& c, const Elem& x, double tol) {
  if (c.generators.empty()) return norm2(x) <= tol;
  return nonneg_least_squares(as_columns(c.generators, c.dim), x.coords()).residual <= tol * std::max(1.0, norm2(x));
}

template <class Elem>
ConeDecomposition<Elem> decompose(const Cone<Elem>& c) {
  ConeDecomposition<Elem> out;
  const std::vector<Elem> gens = unit_dedup(c.generators);
  if (gens.empty()) return out;
  const int d = c.dim;
  const Matrix all = as_columns(gens, d);

  // A generator lies in the lineality space iff its negative belongs to the cone.
  std::vector<Elem> lineal;
  for (const auto& g : gens)
    if (in_cone_lp(all, -g.coords())) lineal.push_back(g);
  const Matrix f = column_span(as_columns(lineal, d));
  for (Eigen::Index i = 0; i < f.cols(); ++i) out.lineality_basis.emplace_back(Eigen::VectorXd(f.col(i)));

  std::vector<Elem> projected;
  for (const auto& g : gens) {
    Eigen::VectorXd v = g.coords();
    if (f.cols() > 0) v -= f * (f.transpose() * v);
    if (v.norm() > 1e-9) projected.emplace_back(Eigen::VectorXd(v / v.norm()));
  }
  out.pointed_generators = extreme_rays(projected);

  for (std::size_t i = 0; i < out.pointed_generators.size(); ++i) {
    for (std::size_t j = i + 1; j < out.pointed_generators.size(); ++j) {
      const double a = angle_between(out.pointed_generators[i], out.pointed_generators[j]);
      out.spherical_diameter = std::max(out.spherical_diameter, a);
    }
  }
  out.right_or_wider = out.spherical_diameter >= kHalfPi - tol::angle;
  return out;
}

NormalCone normal_cone(const Polytope& k, const Vector& q, double tol) {
  const FaceRef f = active_facets(k, q, tol);
  if (f.active_facets.empty()) throw PreconditionError("normal_cone: point is interior to the body");
  NormalCone c{k.dim(), {}};
  for (std::size_t j : f.active_facets) c.generators.push_back(k.facet(j).normal);
  c.generators = extreme_rays(c.generators);
  return c;
}

TangentCone tangent_cone(const Polytope& k, const Vector& q, double tol) {
  const FaceRef f = active_facets(k, q, tol);
  if (f.active_facets.empty()) throw PreconditionError("tangent_cone: point is interior to the body");
  const int d = k.dim();
  Matrix rows(static_cast<Eigen::Index>(f.active_facets.size()), d);
  for (std::size_t r = 0; r < f.active_facets.size(); ++r)
    rows.row(static_cast<Eigen::Index>(r)) = k.facet(f.active_facets[r]).normal.coords().transpose();

  TangentCone t{d, {}};
  const Matrix lineality = null_space(rows);
  for (Eigen::Index i = 0; i < lineality.cols(); ++i) {
    t.generators.emplace_back(Eigen::VectorXd(lineality.col(i)));
    t.generators.emplace_back(Eigen::VectorXd(-lineality.col(i)));
  }

  // Pointed part inside the row space L: extreme rays are cut out by k-1 active rows.
  const Matrix span = column_span(Matrix(rows.transpose()));
  const auto kdim = static_cast<std::size_t>(span.cols());
  const std::size_t na = f.active_facets.size();
  std::vector<Vector> rays;
  std::vector<std::size_t> idx(kdim - 1);
  for (std::size_t i = 0; i + 1 < kdim; ++i) idx[i] = i;
  while (true) {
    Matrix sub(static_cast<Eigen::Index>(kdim - 1), d);
    for (std::size_t r = 0; r + 1 < kdim; ++r) sub.row(static_cast<Eigen::Index>(r)) = rows.row(static_cast<Eigen::Index>(idx[r]));
    const Matrix z = null_space(Matrix(sub * span));
    if (z.cols() == 1) {
      Eigen::VectorXd v = span * z.col(0);
      for (double s : {1.0, -1.0}) {
        const Eigen::VectorXd w = s * v;
        if ((rows * w).maxCoeff() <= 1e-10) rays.emplace_back(Eigen::VectorXd(w / w.norm()));
      }
    }
    // next (kdim-1)-subset of na rows
    std::size_t i = kdim - 1;
    while (i > 0 && idx[i - 1] == na - (kdim - 1) + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j + 1 < kdim; ++j) idx[j] = idx[j - 1] + 1;
  }
  for (auto& r : extreme_rays(rays)) t.generators.push_back(std::move(r));
  return t;
}

bool is_acute_point(const Polytope& k, const Vector& q, double tol) {
  const FaceRef f = active_facets(k, q, tol);
  if (f.classification() != PointClass::NonSmoothBoundary)
    throw PreconditionError("is_acute_point: the acuteness condition concerns non-smooth boundary points only");
  const auto dec = decompose(tangent_cone(k, q, tol));
  return !dec.right_or_wider && dec.spherical_diameter < kHalfPi - tol::angle;
}

AcutenessReport is_acute_body(const Polytope& k) {
  AcutenessReport rep;
  rep.acute = true;
  for (const Face& face : low_dimensional_faces(k)) {
    Vector c = Vector::zero(k.dim());
    for (std::size_t v : face.vertices) c += k.vertices()[v];
    c = c / static_cast<double>(face.vertices.size());
    FaceVerdict fv{face, c, decompose(tangent_cone(k, c)), false};
    fv.acute = !fv.tangent.right_or_wider && fv.tangent.spherical_diameter < kHalfPi - tol::angle;
    rep.acute = rep.acute && fv.acute;
    rep.faces.push_back(std::move(fv));
  }
  return rep;
}

std::vector<double> simplex_dihedral_angles(const Polytope& s) {
  if (s.num_facets() != static_cast<std::size_t>(s.dim()) + 1 || s.vertices().size() != s.num_facets())
    throw PreconditionError("simplex_dihedral_angles: body is not a simplex");
  std::vector<double> out;
  for (std::size_t i = 0; i < s.num_facets(); ++i)
    for (std::size_t j = i + 1; j < s.num_facets(); ++j)
      out.push_back(std::numbers::pi - angle_between(s.facet(i).normal, s.facet(j).normal));
  return out;
}

PlanarSection planar_section(const TangentCone& t, const Covector& ray, const Covector& second) {
  const Covector e1 = normalized(ray);
  Covector e2 = second - dot(second, e1) * e1;
  e2 = normalized(e2);
  PlanarSection s;
  s.lo = -std::numbers::pi;
  s.hi = std::numbers::pi;
  for (const auto& g : t.generators) {
    const double alpha = pair(e1, g), beta = pair(e2, g);
    if (alpha * alpha + beta * beta <= 1e-24) continue;
    // Allowed half-circle is centered at the direction -(alpha, beta).
    const double center = std::atan2(-beta, -std::min(alpha, 0.0));
    s.lo = std::max(s.lo, center - kHalfPi);
    s.hi = std::min(s.hi, center + kHalfPi);
  }
  s.lo = std::min(s.lo, 0.0);
  s.hi = std::max(s.hi, 0.0);
  s.side_lo = std::cos(s.lo) * e1 + std::sin(s.lo) * e2;
  s.side_hi = std::cos(s.hi) * e1 + std::sin(s.hi) * e2;
  return s;
}

ProbeVerdict weak_acuteness_probe(const Polytope& k, const Vector& q, int ray_samples, int plane_samples,
                                  std::uint64_t seed) {
  const FaceRef f = active_facets(k, q);
  if (f.classification() != PointClass::NonSmoothBoundary)
    throw PreconditionError("weak_acuteness_probe: point must be a non-smooth boundary point");
  const int d = k.dim();
  const NormalCone n = normal_cone(k, q);
  const TangentCone t = tangent_cone(k, q);
  const Matrix lin = column_span(as_columns(n.generators, d));  // linear hull of N

  const Halton ray_seq(static_cast<int>(n.generators.size()), seed);
  const Halton dir_seq(d, seed ^ 0x9e3779b97f4a7c15ULL);
  const double threshold = kHalfPi + tol::angle;

  for (int r = 0; r < ray_samples; ++r) {
    // Dirichlet-like weights from the low-discrepancy point.
    const auto u = ray_seq.point(static_cast<std::uint64_t>(r));
    Covector rho = Covector::zero(d);
    for (std::size_t i = 0; i < n.generators.size(); ++i) rho += -std::log(std::max(u[i], 1e-300)) * n.generators[i];
    if (!(norm2(rho) > 1e-12)) continue;
    rho = normalized(rho);

    std::vector<Covector> candidates(n.generators.begin(), n.generators.end());
    for (int p = 0; p < plane_samples; ++p) {
      const auto w = dir_seq.point(static_cast<std::uint64_t>(p));
      Eigen::VectorXd v(d);
      for (int i = 0; i < d; ++i) v[i] = 2.0 * w[static_cast<std::size_t>(i)] - 1.0;
      candidates.emplace_back(Eigen::VectorXd(lin * (lin.transpose() * v)));
    }
    bool found = false;
    for (const auto& c : candidates) {
      const Covector perp = c - dot(c, rho) * rho;
      if (norm2(perp) <= 1e-9) continue;
      if (planar_section(t, rho, perp).width() > threshold) {
        found = true;
        break;
      }
    }
    if (!found) return ProbeVerdict::Unresolved;
  }
  return ProbeVerdict::Confirmed;
}

template std::vector<Vector> extreme_rays(const std::vector<Vector>&);
template std::vector<Covector> extreme_rays(const std::vector<Covector>&);
template bool cone_contains(const Cone<Vector>&, const Vector&, double);
template bool cone_contains(const Cone<Covector>&, const Covector&, double);
template ConeDecomposition<Vector> decompose(const Cone<Vector>&);
template ConeDecomposition<Covector> decompose(const Cone<Covector>&);

}  // namespace billiards
