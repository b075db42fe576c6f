#pragma once

#include <Eigen/Dense>
#include <utility>

#include "ramopt/errors.hpp"

namespace ramopt::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct QrResult {
  Matrix Q;  // m x n, orthonormal columns
  Matrix R;  // n x n, upper triangular, diag(R) >= 0
};

/// Thin QR of an m x n matrix, m >= n. The sign convention diag(R) >= 0
/// makes the factorization unique for full-rank input. Rank deficiency is
/// not an error; the corresponding diagonal entries of R are zero.
QrResult thin_qr(const Matrix& A);

struct EigResult {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

/// Symmetric eigendecomposition. The input is symmetrized internally.
EigResult sym_eig(const Matrix& S);

enum class MatrixFn { Log, Exp, Sqrt, InvSqrt };

/// V f(L) V^T from sym_eig. Log/Sqrt/InvSqrt require eigenvalues with
/// lambda_min > 1e-14 * lambda_max; violations throw SpdDomainError.
Matrix spd_fn(const Matrix& S, MatrixFn fn);

struct SvdResult {
  Matrix U;  // m x r
  Vector s;  // r, descending, nonnegative
  Matrix V;  // n x r
};

/// Thin SVD with r = min(m, n).
SvdResult thin_svd(const Matrix& A);

}  // namespace ramopt::linalg
