// Factor-once tridiagonal solver (Thomas algorithm without pivoting).
//
// The matrices built in this library are strictly diagonally dominant,
// which is what makes the unpivoted elimination stable.
#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "inls/params_grid.hpp"

namespace inls {

template <class T>
class TridiagonalLU {
 public:
  TridiagonalLU() = default;

  /// Row i reads lower[i] x_{i-1} + diag[i] x_i + upper[i] x_{i+1}.
  TridiagonalLU(std::span<const T> lower, std::span<const T> diag, std::span<const T> upper)
      : lower_(lower.begin(), lower.end()), inv_pivot_(diag.size()), upper_(upper.begin(), upper.end()) {
    const std::size_t n = diag.size();
    modified_upper_.resize(n);
    T pivot = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) pivot = diag[i] - lower_[i] * modified_upper_[i - 1];
      if (std::abs(pivot) < 1e-300) throw NumericalError("singular tridiagonal system");
      inv_pivot_[i] = T(1) / pivot;
      modified_upper_[i] = upper_[i] * inv_pivot_[i];
    }
  }

  std::size_t size() const { return inv_pivot_.size(); }

  /// Solves in place.
  template <class U>
  void solve(std::span<U> x) const {
    const std::size_t n = size();
    x[0] = x[0] * inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - lower_[i] * x[i - 1]) * inv_pivot_[i];
    U acc = x[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
      x[i] -= modified_upper_[i] * x[i + 1];
      acc += x[i];
    }
    if (!finite(acc)) throw NumericalError("tridiagonal solve produced non-finite values");
  }

 private:
  static bool finite(double v) { return std::isfinite(v); }
  static bool finite(const std::complex<double>& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

  std::vector<T> lower_;
  std::vector<T> inv_pivot_;
  std::vector<T> upper_;
  std::vector<T> modified_upper_;
};

}  // namespace inls
