#pragma once

#include <cassert>

#include <Eigen/Core>

#include "rupture/errors.hpp"

namespace rupture {

/// Periodic tridiagonal system
///
///   lower(i) x(i-1) + diag(i) x(i) + upper(i) x(i+1) = b(i),  indices mod n,
///
/// factored once and solved for many right-hand sides. The corner entries are
/// removed by a Sherman-Morrison rank-one update, leaving two Thomas sweeps
/// per solve. Intended for diagonally dominant matrices (no pivoting).
template <typename Scalar>
class CyclicTridiagonal {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  CyclicTridiagonal(Vector lower, Vector diag, Vector upper)
      : lower_(std::move(lower)), diag_(std::move(diag)), upper_(std::move(upper)) {
    const Eigen::Index n = diag_.size();
    if (n < 3 || lower_.size() != n || upper_.size() != n)
      throw SizeError("cyclic tridiagonal system needs n >= 3 and matching bands");
    factor();
  }

  /// Constant-coefficient system: `off` on both off-diagonals.
  static CyclicTridiagonal constant(Eigen::Index n, Scalar off, Scalar diag) {
    return CyclicTridiagonal(Vector::Constant(n, off), Vector::Constant(n, diag),
                             Vector::Constant(n, off));
  }

  Eigen::Index size() const { return diag_.size(); }

  template <typename Derived>
  Vector solve(const Eigen::MatrixBase<Derived>& rhs) const {
    assert(rhs.size() == size());
    Vector y = thomas(rhs);
    const Eigen::Index n = size();
    const Scalar vy = y(0) + lower_(0) / gamma_ * y(n - 1);
    y -= (vy / denom_) * z_;
    return y;
  }

  /// A x, using the original (uncorrected) bands.
  template <typename Derived>
  Vector apply(const Eigen::MatrixBase<Derived>& x) const {
    const Eigen::Index n = size();
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index im = i == 0 ? n - 1 : i - 1;
      const Eigen::Index ip = i == n - 1 ? 0 : i + 1;
      out(i) = lower_(i) * x(im) + diag_(i) * x(i) + upper_(i) * x(ip);
    }
    return out;
  }

  const Vector& lower() const { return lower_; }
  const Vector& diag() const { return diag_; }
  const Vector& upper() const { return upper_; }

 private:
  void factor() {
    const Eigen::Index n = size();
    gamma_ = -diag_(0);
    Vector b = diag_;
    b(0) -= gamma_;
    b(n - 1) -= lower_(0) * upper_(n - 1) / gamma_;

    // Thomas forward coefficients for the modified (non-cyclic) matrix.
    cprime_.resize(n);
    inv_pivot_.resize(n);
    inv_pivot_(0) = Scalar(1) / b(0);
    cprime_(0) = upper_(0) * inv_pivot_(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      const Scalar pivot = b(i) - lower_(i) * cprime_(i - 1);
      inv_pivot_(i) = Scalar(1) / pivot;
      cprime_(i) = upper_(i) * inv_pivot_(i);
    }

    Vector u = Vector::Zero(n);
    u(0) = gamma_;
    u(n - 1) = upper_(n - 1);
    z_ = thomas(u);
    denom_ = Scalar(1) + z_(0) + lower_(0) / gamma_ * z_(n - 1);
  }

  template <typename Derived>
  Vector thomas(const Eigen::MatrixBase<Derived>& rhs) const {
    const Eigen::Index n = size();
    Vector x(n);
    x(0) = rhs(0) * inv_pivot_(0);
    for (Eigen::Index i = 1; i < n; ++i)
      x(i) = (rhs(i) - lower_(i) * x(i - 1)) * inv_pivot_(i);
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= cprime_(i) * x(i + 1);
    return x;
  }

  Vector lower_, diag_, upper_;
  Vector cprime_, inv_pivot_, z_;
  Scalar gamma_{};
  Scalar denom_{};
};

}  // namespace rupture
