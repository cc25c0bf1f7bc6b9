#pragma once

#include <span>
#include <vector>

namespace hcnet {

/// Singular values of the upper bidiagonal matrix with diagonal `diag`
/// (n entries) and superdiagonal `super` (n-1 entries), all positive.
///
/// Bisection on the zero-diagonal Golub-Kahan tridiagonal form, in log
/// scale, so every singular value is found to high relative accuracy no
/// matter how widely they are spread. Returned in increasing order.
std::vector<double> bidiagonal_singular_values(std::span<const double> diag, std::span<const double> super);

/// Number of eigenvalues below x of the symmetric tridiagonal matrix with
/// zero diagonal and off-diagonal squares `offsq` (Sturm count).
int zero_diagonal_sturm_count(std::span<const double> offsq, double x);

}  // namespace hcnet
