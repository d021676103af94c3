#include "rpsde/linalg.hpp"

#include <cmath>
#include <utility>

#include "rpsde/error.hpp"

namespace rpsde {

void solve_in_place(std::vector<double> a, std::span<double> b, std::size_t n,
                    std::size_t cols) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    }
    if (a[piv * n + c] == 0.0) throw SingularityError("singular matrix in linear solve");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      for (std::size_t j = 0; j < cols; ++j) std::swap(b[c * cols + j], b[piv * cols + j]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
      for (std::size_t j = 0; j < cols; ++j) b[r * cols + j] -= f * b[c * cols + j];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t j = 0; j < cols; ++j) {
      double s = b[c * cols + j];
      for (std::size_t k = c + 1; k < n; ++k) s -= a[c * n + k] * b[k * cols + j];
      b[c * cols + j] = s / a[c * n + c];
    }
  }
}

void right_pseudo_inverse(std::span<const double> s, std::size_t d, std::size_t m,
                          std::span<double> out) {
  if (d == 1 && m == 1) {
    if (s[0] == 0.0) throw SingularityError("diffusion coefficient vanishes");
    out[0] = 1.0 / s[0];
    return;
  }
  // G = S S^T (d x d); solve G Y = S (d x m), then R = Y^T.
  std::vector<double> g(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < m; ++k) v += s[i * m + k] * s[j * m + k];
      g[i * d + j] = v;
    }
  }
  std::vector<double> y(s.begin(), s.end());
  solve_in_place(std::move(g), y, d, m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < d; ++i) out[k * d + i] = y[i * m + k];
  }
}

double norm2(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace rpsde
