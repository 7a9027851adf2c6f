#include "billiards/numkernel.hpp"

#include <limits>

namespace billiards {

double pair(const Covector& n, const Vector& v) {
  if (n.dim() != v.dim()) throw DimensionMismatch("pair: covector and vector dimensions differ");
  return n.coords().dot(v.coords());
}

Matrix null_space(const Matrix& rows, double rel_tol) {
  const Eigen::Index n = rows.cols();
  if (rows.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = s.size() > 0 ? std::max(s[0], 1.0) : 1.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * scale) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Matrix column_span(const Matrix& cols, double rel_tol) {
  if (cols.cols() == 0) return Matrix(cols.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double scale = std::max(s[0], 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * scale) ++rank;
  return svd.matrixU().leftCols(rank);
}

int numerical_rank(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double scale = std::max(s[0], 1.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * scale) ++rank;
  return rank;
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Breakdown: return "breakdown";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kMaxIterations = 20000;

// Dense tableau.  Rows 0..m-1 are constraints, row m holds reduced costs
// r_j = z_j - c_j of the current (maximization) objective.  The last column is the rhs.
class Tableau {
 public:
  Tableau(Eigen::Index m, Eigen::Index n) : t_(Matrix::Zero(m + 1, n + 1)), basis_(m, -1) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double& at(Eigen::Index i, Eigen::Index j) { return t_(i, j); }
  double at(Eigen::Index i, Eigen::Index j) const { return t_(i, j); }
  double& rhs(Eigen::Index i) { return t_(i, t_.cols() - 1); }
  double cost(Eigen::Index j) const { return t_(rows(), j); }
  double value() const { return t_(rows(), t_.cols() - 1); }
  std::vector<Eigen::Index>& basis() { return basis_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Installs objective `c` (maximize) as reduced costs w.r.t. the current basis.
  void set_objective(const Eigen::VectorXd& c) {
    const Eigen::Index m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cols()) = -c.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double cb = c[basis_[static_cast<std::size_t>(i)]];
      if (cb != 0.0) t_.row(m) += cb * t_.row(i);
    }
  }

  // Bland's rule: lowest-index improving column, lowest-index leaving basic variable.
  LpStatus run(const std::vector<bool>& may_enter, int& iterations) {
    const Eigen::Index m = rows();
    while (true) {
      if (++iterations > kMaxIterations) return LpStatus::Breakdown;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < cols(); ++j) {
        if (may_enter[static_cast<std::size_t>(j)] && t_(m, j) < -tol::feas) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(rhs(i), 0.0) / a;
        if (ratio < best - 1e-12 ||
            (ratio <= best + 1e-12 && leave >= 0 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          if (ratio < best - 1e-12) best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
      if (!t_.allFinite()) return LpStatus::Breakdown;
    }
  }

 private:
  Matrix t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpOutcome solve_lp(const LpProblem& p) {
  const std::size_t nvars = p.num_vars();
  const std::size_t m = p.constraints.size();
  if (!p.lower_bounds.empty() && p.lower_bounds.size() != nvars)
    throw DimensionMismatch("solve_lp: lower_bounds arity differs from objective");
  for (const auto& c : p.constraints)
    if (c.row.size() != nvars) throw DimensionMismatch("solve_lp: constraint row arity differs from objective");

  // Column map: each original variable becomes one shifted column (bounded) or two (free).
  struct ColMap {
    Eigen::Index pos;
    Eigen::Index neg;  // -1 when bounded
    double shift;
  };
  std::vector<ColMap> map(nvars);
  Eigen::Index ns = 0;
  for (std::size_t k = 0; k < nvars; ++k) {
    const bool bounded = !p.lower_bounds.empty() && p.lower_bounds[k].has_value();
    map[k] = {ns++, bounded ? Eigen::Index{-1} : ns++, bounded ? *p.lower_bounds[k] : 0.0};
  }

  // Row sign flips make every rhs nonnegative.
  std::vector<double> sign(m, 1.0);
  std::vector<double> rhs(m);
  std::vector<bool> is_ge(m, false), is_eq(m, false);
  Eigen::Index nslack = 0, nart = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = p.constraints[i];
    double b = c.rhs;
    for (std::size_t k = 0; k < nvars; ++k) b -= c.row[k] * map[k].shift;
    if (b < 0.0) sign[i] = -1.0;
    rhs[i] = sign[i] * b;
    is_eq[i] = c.rel == Relation::Equal;
    is_ge[i] = !is_eq[i] && sign[i] < 0.0;
    if (!is_eq[i]) ++nslack;
    if (is_eq[i] || is_ge[i]) ++nart;
  }

  const Eigen::Index ncols = ns + nslack + nart;
  Tableau tab(static_cast<Eigen::Index>(m), ncols);
  std::vector<Eigen::Index> init_col(m);
  std::vector<bool> artificial(static_cast<std::size_t>(ncols), false);
  Eigen::Index slack_at = ns, art_at = ns + nslack;
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto& c = p.constraints[i];
    for (std::size_t k = 0; k < nvars; ++k) {
      const double a = sign[i] * c.row[k];
      tab.at(ii, map[k].pos) = a;
      if (map[k].neg >= 0) tab.at(ii, map[k].neg) = -a;
    }
    tab.rhs(ii) = rhs[i];
    if (!is_eq[i]) {
      const Eigen::Index s = slack_at++;
      tab.at(ii, s) = is_ge[i] ? -1.0 : 1.0;
      if (!is_ge[i]) init_col[i] = s;
    }
    if (is_eq[i] || is_ge[i]) {
      const Eigen::Index a = art_at++;
      tab.at(ii, a) = 1.0;
      artificial[static_cast<std::size_t>(a)] = true;
      init_col[i] = a;
    }
    tab.basis()[i] = init_col[i];
  }

  LpOutcome out;
  auto extract_dual = [&](bool phase_one) {
    out.dual.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::Index c = init_col[i];
      double y = tab.cost(c);
      if (phase_one && artificial[static_cast<std::size_t>(c)]) y -= 1.0;
      out.dual[i] = sign[i] * y;
    }
  };

  // Phase 1: maximize -sum(artificials).
  if (nart > 0) {
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(ncols);
    for (Eigen::Index j = 0; j < ncols; ++j)
      if (artificial[static_cast<std::size_t>(j)]) c1[j] = -1.0;
    tab.set_objective(c1);
    std::vector<bool> may_enter(static_cast<std::size_t>(ncols), true);
    const LpStatus s1 = tab.run(may_enter, out.iterations);
    if (s1 == LpStatus::Breakdown || s1 == LpStatus::Unbounded) {
      out.status = LpStatus::Breakdown;
      return out;
    }
    double bscale = 1.0;
    for (double b : rhs) bscale = std::max(bscale, std::abs(b));
    if (tab.value() < -tol::feas * bscale) {
      out.status = LpStatus::Infeasible;
      extract_dual(true);
      return out;
    }
    // Drive remaining artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      if (!artificial[static_cast<std::size_t>(tab.basis()[static_cast<std::size_t>(i)])]) continue;
      for (Eigen::Index j = 0; j < ncols; ++j) {
        if (!artificial[static_cast<std::size_t>(j)] && std::abs(tab.at(i, j)) > 1e-9) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase 2.
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(ncols);
  for (std::size_t k = 0; k < nvars; ++k) {
    c2[map[k].pos] = p.objective[k];
    if (map[k].neg >= 0) c2[map[k].neg] = -p.objective[k];
  }
  tab.set_objective(c2);
  std::vector<bool> may_enter(static_cast<std::size_t>(ncols));
  for (Eigen::Index j = 0; j < ncols; ++j) may_enter[static_cast<std::size_t>(j)] = !artificial[static_cast<std::size_t>(j)];
  const LpStatus s2 = tab.run(may_enter, out.iterations);
  out.status = s2;
  if (s2 != LpStatus::Optimal) return out;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(ncols);
  for (Eigen::Index i = 0; i < tab.rows(); ++i) x[tab.basis()[static_cast<std::size_t>(i)]] = tab.rhs(i);
  out.primal.resize(nvars);
  double obj = 0.0;
  for (std::size_t k = 0; k < nvars; ++k) {
    double v = x[map[k].pos] + map[k].shift;
    if (map[k].neg >= 0) v -= x[map[k].neg];
    out.primal[k] = v;
    obj += p.objective[k] * v;
  }
  out.objective = obj;
  extract_dual(false);
  return out;
}

HullMembership zero_in_convex_hull(const std::vector<Covector>& ns) {
  if (ns.empty()) throw PreconditionError("zero_in_convex_hull: empty input");
  const int d = ns.front().dim();
  for (const auto& n : ns) {
    if (n.dim() != d) throw DimensionMismatch("zero_in_convex_hull: mixed dimensions");
    if (!(norm2(n) > 0.0)) throw PreconditionError("zero_in_convex_hull: zero covector");
  }
  const std::size_t k = ns.size();

  // Feasibility: lambda >= 0, sum lambda = 1, sum lambda n_i = 0.
  auto base = [&](std::size_t extra) {
    LpProblem lp;
    lp.objective.assign(k + extra, 0.0);
    lp.lower_bounds.assign(k + extra, std::nullopt);
    for (std::size_t i = 0; i < k; ++i) lp.lower_bounds[i] = 0.0;
    for (int r = 0; r < d; ++r) {
      std::vector<double> row(k + extra, 0.0);
      for (std::size_t i = 0; i < k; ++i) row[i] = ns[i][r];
      lp.add(std::move(row), Relation::Equal, 0.0);
    }
    std::vector<double> ones(k + extra, 0.0);
    for (std::size_t i = 0; i < k; ++i) ones[i] = 1.0;
    lp.add(std::move(ones), Relation::Equal, 1.0);
    return lp;
  };

  HullMembership out;
  const LpOutcome feas = solve_lp(base(0));
  if (feas.status != LpStatus::Optimal) return out;
  out.contains = true;
  out.weights = feas.primal;
  for (double& w : out.weights) w = std::max(w, 0.0);

  // Interior: the hull must contain t*u for some t > 0 along every direction u = +-e_r.
  out.interior = true;
  for (int r = 0; r < d && out.interior; ++r) {
    for (double s : {1.0, -1.0}) {
      LpProblem lp = base(1);
      lp.objective[k] = 1.0;
      lp.constraints[static_cast<std::size_t>(r)].row[k] = -s;
      const LpOutcome o = solve_lp(lp);
      if (o.status != LpStatus::Optimal || o.primal[k] <= tol::strict) {
        out.interior = false;
        break;
      }
    }
  }
  return out;
}

NnlsResult nonneg_least_squares(const Matrix& g, const Eigen::VectorXd& x) {
  // Lawson-Hanson active set method.
  const Eigen::Index n = g.cols();
  if (g.rows() != x.size()) throw DimensionMismatch("nonneg_least_squares: row mismatch");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double scale = std::max(1.0, x.norm()) * std::max(1.0, g.norm());
  const double eps = 1e-13 * scale;

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    z = Eigen::VectorXd::Zero(n);
    if (idx.empty()) return;
    Matrix gp(g.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) gp.col(static_cast<Eigen::Index>(c)) = g.col(idx[c]);
    const Eigen::VectorXd zp = gp.completeOrthogonalDecomposition().solve(x);
    for (std::size_t c = 0; c < idx.size(); ++c) z[idx[c]] = zp[static_cast<Eigen::Index>(c)];
  };

  for (int outer = 0; outer < 3 * static_cast<int>(n) + 10; ++outer) {
    const Eigen::VectorXd grad = g.transpose() * (x - g * w);
    Eigen::Index best = -1;
    double best_val = eps;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && grad[j] > best_val) {
        best_val = grad[j];
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < 3 * static_cast<int>(n) + 10; ++inner) {
      Eigen::VectorXd z;
      solve_passive(z);
      bool ok = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) ok = false;
      if (ok) {
        w = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) alpha = std::min(alpha, w[j] / (w[j] - z[j]));
      }
      w += alpha * (z - w);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && w[j] <= 1e-15 * scale) {
          passive[static_cast<std::size_t>(j)] = false;
          w[j] = 0.0;
        }
      }
    }
  }
  NnlsResult out;
  out.weights.assign(w.data(), w.data() + n);
  out.residual = (g * w - x).norm();
  return out;
}

}  // namespace billiards
