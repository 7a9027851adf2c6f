#include "billiards/norm.hpp"

#include <limits>

namespace billiards {

NormBody NormBody::euclidean(int d) {
  if (d < 1) throw PreconditionError("dimension must be positive");
  return NormBody(d, Euclidean{});
}

NormBody NormBody::ellipsoid(Matrix shape, Covector center) {
  const auto d = shape.rows();
  if (shape.cols() != d || center.dim() != d) throw DimensionMismatch("ellipsoid: shape/center sizes differ");
  if (!shape.allFinite() || !center.is_finite()) throw PreconditionError("ellipsoid: non-finite data");
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, shape.cwiseAbs().maxCoeff()))
    throw PreconditionError("ellipsoid: shape matrix is not symmetric");
  Eigen::LLT<Matrix> llt(shape);
  if (llt.info() != Eigen::Success) throw PreconditionError("ellipsoid: shape matrix is not positive definite");
  const double q = center.coords().dot(shape * center.coords());
  if (!(q < 1.0)) throw PreconditionError("ellipsoid: origin is not interior to T (c^T M c >= 1)");
  return NormBody(static_cast<int>(d), ShiftedEllipsoid{std::move(shape), std::move(center)});
}

NormBody NormBody::dual_polytope(std::vector<Covector> vertices) {
  if (vertices.empty()) throw PreconditionError("dual polytope: no vertices");
  const int d = vertices.front().dim();
  for (const auto& v : vertices)
    if (v.dim() != d) throw DimensionMismatch("dual polytope: mixed dimensions");
  for (const auto& v : vertices)
    if (!(norm2(v) > 0.0)) throw PreconditionError("dual polytope: origin is a vertex, not interior");
  if (!zero_in_convex_hull(vertices).interior) throw PreconditionError("dual polytope: origin is not interior to T");
  return NormBody(d, DualPolytope{std::move(vertices)});
}

Matrix NormBody::metric() const {
  if (std::holds_alternative<Euclidean>(body_)) return Matrix::Identity(dim_, dim_);
  if (const auto* e = std::get_if<ShiftedEllipsoid>(&body_)) return e->shape.inverse();
  throw PreconditionError("polytopal dual body has no quadratic metric");
}

Covector NormBody::shift() const {
  if (std::holds_alternative<Euclidean>(body_)) return Covector::zero(dim_);
  if (const auto* e = std::get_if<ShiftedEllipsoid>(&body_)) return e->center;
  throw PreconditionError("polytopal dual body has no center");
}

double norm_eval(const NormBody& t, const Vector& v) {
  if (v.dim() != t.dim()) throw DimensionMismatch("norm_eval: dimension mismatch");
  return std::visit(
      [&](const auto& b) -> double {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, Euclidean>) {
          return v.coords().norm();
        } else if constexpr (std::is_same_v<B, ShiftedEllipsoid>) {
          const Eigen::VectorXd w = b.shape.ldlt().solve(v.coords());
          return pair(b.center, v) + std::sqrt(std::max(0.0, v.coords().dot(w)));
        } else {
          double best = -std::numeric_limits<double>::infinity();
          for (const auto& p : b.vertices) best = std::max(best, pair(p, v));
          return best;
        }
      },
      t.variant());
}

Covector momentum(const NormBody& t, const Vector& v) {
  if (v.dim() != t.dim()) throw DimensionMismatch("momentum: dimension mismatch");
  if (!(v.coords().norm() > 0.0)) throw PreconditionError("momentum of the zero vector is undefined");
  return std::visit(
      [&](const auto& b) -> Covector {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, Euclidean>) {
          return as_covector(v) / v.coords().norm();
        } else if constexpr (std::is_same_v<B, ShiftedEllipsoid>) {
          // argmax of <p, v> over the ellipsoid: c + M^{-1} v / sqrt(v^T M^{-1} v).
          const Eigen::VectorXd w = b.shape.ldlt().solve(v.coords());
          return b.center + Covector(Eigen::VectorXd(w / std::sqrt(v.coords().dot(w))));
        } else {
          throw PreconditionError("momentum is set-valued for a polytopal dual body; a smooth T is required");
        }
      },
      t.variant());
}

NormBody transform_dual(const NormBody& t, const Matrix& a) {
  const int d = t.dim();
  if (a.rows() != d || a.cols() != d) throw DimensionMismatch("transform_dual: matrix size");
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw PreconditionError("transform_dual: singular matrix");
  const Matrix inv = lu.inverse();
  return std::visit(
      [&](const auto& b) -> NormBody {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, Euclidean>) {
          // A^T B is a ball again only when A is orthogonal.
          if ((a * a.transpose() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-14) return NormBody::euclidean(d);
          Matrix m = inv * inv.transpose();
          m = 0.5 * (m + m.transpose());
          return NormBody::ellipsoid(std::move(m), Covector::zero(d));
        } else if constexpr (std::is_same_v<B, ShiftedEllipsoid>) {
          // p' = A^T p  =>  (p' - A^T c)^T A^{-1} M A^{-T} (p' - A^T c) <= 1.
          Matrix m = inv * b.shape * inv.transpose();
          m = 0.5 * (m + m.transpose());
          return NormBody::ellipsoid(std::move(m), Covector(Eigen::VectorXd(a.transpose() * b.center.coords())));
        } else {
          std::vector<Covector> vs;
          for (const auto& p : b.vertices) vs.emplace_back(Eigen::VectorXd(a.transpose() * p.coords()));
          return NormBody::dual_polytope(std::move(vs));
        }
      },
      t.variant());
}

}  // namespace billiards
