#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace riemann_entropy {

// Symmetric tridiagonal matrix, stored as main diagonal + one off diagonal.
struct SymTridiagonal {
  std::vector<double> diag;  // size d
  std::vector<double> off;   // size d-1 (empty when d <= 1)

  int size() const { return static_cast<int>(diag.size()); }

  std::vector<double> multiply(const std::vector<double>& x) const {
    const std::size_t d = diag.size();
    std::vector<double> y(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      y[i] = diag[i] * x[i];
      if (i > 0) y[i] += off[i - 1] * x[i - 1];
      if (i + 1 < d) y[i] += off[i] * x[i + 1];
    }
    return y;
  }
};

// LDL^T factorization without pivoting.  Succeeds iff the matrix is positive
// definite (all pivots strictly positive).
struct TridiagonalLDLT {
  std::vector<double> D;  // pivots
  std::vector<double> L;  // subdiagonal multipliers

  static std::optional<TridiagonalLDLT> factor(const SymTridiagonal& m) {
    const std::size_t d = m.diag.size();
    TridiagonalLDLT f;
    f.D.resize(d);
    f.L.resize(d > 0 ? d - 1 : 0);
    for (std::size_t i = 0; i < d; ++i) {
      double piv = m.diag[i];
      if (i > 0) piv -= f.L[i - 1] * f.L[i - 1] * f.D[i - 1];
      if (!(piv > 0.0)) return std::nullopt;
      f.D[i] = piv;
      if (i + 1 < d) f.L[i] = m.off[i] / piv;
    }
    return f;
  }

  std::vector<double> solve(std::vector<double> rhs) const {
    const std::size_t d = D.size();
    for (std::size_t i = 1; i < d; ++i) rhs[i] -= L[i - 1] * rhs[i - 1];
    for (std::size_t i = 0; i < d; ++i) rhs[i] /= D[i];
    for (std::size_t i = d; i-- > 1;) rhs[i - 1] -= L[i - 1] * rhs[i];
    return rhs;
  }
};

inline bool positive_definite(const SymTridiagonal& m) {
  return TridiagonalLDLT::factor(m).has_value();
}

}  // namespace riemann_entropy
