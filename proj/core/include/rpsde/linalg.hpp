#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rpsde {

/// Solves A X = B in place for a small dense row-major n x n matrix A and an
/// n x cols right-hand side B (Gaussian elimination, partial pivoting).
/// Throws SingularityError when a pivot vanishes.
void solve_in_place(std::vector<double> a, std::span<double> b, std::size_t n,
                    std::size_t cols);

/// Right pseudo-inverse R = S^T (S S^T)^{-1} of a full-row-rank d x m matrix S
/// (row-major). Writes the m x d result to `out`.
void right_pseudo_inverse(std::span<const double> s, std::size_t d, std::size_t m,
                          std::span<double> out);

double norm2(std::span<const double> v) noexcept;

}  // namespace rpsde
