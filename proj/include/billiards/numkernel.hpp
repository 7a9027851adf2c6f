#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace billiards {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised when an input violates a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a body description is unbounded, empty, degenerate or otherwise unusable.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Tolerances shared across modules.

namespace tol {
inline constexpr double feas = 1e-9;      // LP primal/dual feasibility
inline constexpr double strict = 1e-9;    // max-slack threshold for strict inequalities
inline constexpr double boundary = 1e-7;  // facet activity on normalized facets
inline constexpr double angle = 1e-7;     // radians
inline constexpr double law = 1e-7;       // reflection-law residual
}  // namespace tol

using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Points of V and functionals on V.  The two share a representation but are
// distinct types: the duality pairing is the only bridge between them.

template <class Tag>
class Coords {
 public:
  Coords() = default;
  explicit Coords(Eigen::VectorXd c) : c_(std::move(c)) {}
  Coords(std::initializer_list<double> values) : c_(static_cast<Eigen::Index>(values.size())) {
    Eigen::Index i = 0;
    for (double v : values) c_[i++] = v;
  }
  explicit Coords(const std::vector<double>& values)
      : c_(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))) {}

  static Coords zero(int d) { return Coords(Eigen::VectorXd::Zero(d)); }
  static Coords unit(int d, int k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[k] = 1.0;
    return Coords(std::move(e));
  }

  int dim() const { return static_cast<int>(c_.size()); }
  double operator[](int i) const { return c_[i]; }
  double& operator[](int i) { return c_[i]; }
  const Eigen::VectorXd& coords() const { return c_; }
  Eigen::VectorXd& coords() { return c_; }
  std::vector<double> to_std() const { return {c_.data(), c_.data() + c_.size()}; }

  Coords& operator+=(const Coords& o) {
    check(o);
    c_ += o.c_;
    return *this;
  }
  Coords& operator-=(const Coords& o) {
    check(o);
    c_ -= o.c_;
    return *this;
  }
  Coords& operator*=(double s) {
    c_ *= s;
    return *this;
  }
  friend Coords operator+(Coords a, const Coords& b) { return a += b; }
  friend Coords operator-(Coords a, const Coords& b) { return a -= b; }
  friend Coords operator-(Coords a) { return a *= -1.0; }
  friend Coords operator*(double s, Coords a) { return a *= s; }
  friend Coords operator*(Coords a, double s) { return a *= s; }
  friend Coords operator/(Coords a, double s) { return a *= 1.0 / s; }

  bool is_finite() const { return c_.allFinite(); }

 private:
  void check(const Coords& o) const {
    if (o.c_.size() != c_.size()) throw DimensionMismatch("coordinate dimensions differ");
  }
  Eigen::VectorXd c_;
};

struct PrimalTag;
struct DualTag;
using Vector = Coords<PrimalTag>;
using Covector = Coords<DualTag>;

/// The canonical pairing <n, v> between V* and V.
double pair(const Covector& n, const Vector& v);

// Euclidean structure within one space (angles between normals, lengths of segments).
template <class Tag>
double dot(const Coords<Tag>& a, const Coords<Tag>& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("coordinate dimensions differ");
  return a.coords().dot(b.coords());
}
template <class Tag>
double norm2(const Coords<Tag>& a) {
  return a.coords().norm();
}
template <class Tag>
Coords<Tag> normalized(const Coords<Tag>& a) {
  const double n = norm2(a);
  if (!(n > 0.0)) throw PreconditionError("cannot normalize a zero vector");
  return a / n;
}
/// Angle in [0, pi] between two nonzero elements of the same space.
template <class Tag>
double angle_between(const Coords<Tag>& a, const Coords<Tag>& b) {
  const double c = dot(a, b) / (norm2(a) * norm2(b));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Euclidean identification of V with V* (transpose).  Explicit on purpose.
inline Covector as_covector(const Vector& v) { return Covector(v.coords()); }
inline Vector as_vector(const Covector& n) { return Vector(n.coords()); }

// ---------------------------------------------------------------------------
// Small dense linear algebra helpers

/// Orthonormal basis (as columns) of the null space of `rows`.
Matrix null_space(const Matrix& rows, double rel_tol = 1e-10);

/// Orthonormal basis (as columns) of the column span of `cols`.
Matrix column_span(const Matrix& cols, double rel_tol = 1e-10);

int numerical_rank(const Matrix& m, double rel_tol = 1e-10);

// ---------------------------------------------------------------------------
// Linear programming: maximize c.x subject to rows (<= or =) and optional lower bounds.
// Variables without a lower bound are free.

enum class Relation { LessEqual, Equal };

struct LpConstraint {
  std::vector<double> row;
  Relation rel = Relation::LessEqual;
  double rhs = 0.0;
};

struct LpProblem {
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  std::vector<std::optional<double>> lower_bounds;  // empty => all free

  std::size_t num_vars() const { return objective.size(); }
  void add(std::vector<double> row, Relation rel, double rhs) {
    constraints.push_back({std::move(row), rel, rhs});
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, Breakdown };

std::string to_string(LpStatus s);

struct LpOutcome {
  LpStatus status = LpStatus::Breakdown;
  double objective = 0.0;
  std::vector<double> primal;
  // Optimal: dual multipliers (>= 0 on <= rows) with y^T A = c on free columns.
  // Infeasible: Farkas ray y with y >= 0 on <= rows, y^T A_shifted >= 0 (= 0 on free
  // columns) and y^T (b - A l) < 0.
  std::vector<double> dual;
  int iterations = 0;
};

/// Dense two-phase simplex with Bland's rule.
LpOutcome solve_lp(const LpProblem& p);

struct HullMembership {
  bool contains = false;
  bool interior = false;
  std::vector<double> weights;  // convex weights when contains
};

/// Decides whether the origin lies in conv{ns}; `interior` refers to the interior in V*.
HullMembership zero_in_convex_hull(const std::vector<Covector>& ns);

struct NnlsResult {
  std::vector<double> weights;
  double residual = 0.0;  // Euclidean norm of G w - x
};

/// min |G w - x| over w >= 0, where the columns of G are the generators.
NnlsResult nonneg_least_squares(const Matrix& generators, const Eigen::VectorXd& x);

}  // namespace billiards
