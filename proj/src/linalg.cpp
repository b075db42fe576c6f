#include "ramopt/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace ramopt::linalg {

namespace {

void require_finite(const Matrix& A, const char* op) {
  if (!A.allFinite()) {
    throw Error(std::string(op) + ": input has non-finite entries");
  }
}

}  // namespace

QrResult thin_qr(const Matrix& A) {
  require_finite(A, "thin_qr");
  const Eigen::Index m = A.rows(), n = A.cols();
  if (m < n) {
    throw DimensionError("thin_qr: need rows >= cols, got " +
                         std::to_string(m) + " x " + std::to_string(n));
  }
  Eigen::HouseholderQR<Matrix> qr(A);
  QrResult out;
  out.Q = qr.householderQ() * Matrix::Identity(m, n);
  out.R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.R(i, i) < 0.0) {
      out.Q.col(i) = -out.Q.col(i);
      out.R.row(i) = -out.R.row(i);
    }
  }
  return out;
}

EigResult sym_eig(const Matrix& S) {
  require_finite(S, "sym_eig");
  if (S.rows() != S.cols()) {
    throw DimensionError("sym_eig: matrix not square");
  }
  Matrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error("sym_eig: eigensolver failed to converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix spd_fn(const Matrix& S, MatrixFn fn) {
  EigResult eig = sym_eig(S);
  const Eigen::Index n = eig.values.size();
  const double lmax = (n > 0) ? eig.values(n - 1) : 0.0;
  const double lmin = (n > 0) ? eig.values(0) : 0.0;
  if (fn != MatrixFn::Exp) {
    if (lmin <= 0.0 || lmin <= 1e-14 * lmax) {
      throw SpdDomainError("spd_fn: matrix not positive definite (lambda_min=" +
                               std::to_string(lmin) + ")",
                           lmin);
    }
  }
  Vector f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = eig.values(i);
    switch (fn) {
      case MatrixFn::Log: f(i) = std::log(l); break;
      case MatrixFn::Exp: f(i) = std::exp(l); break;
      case MatrixFn::Sqrt: f(i) = std::sqrt(l); break;
      case MatrixFn::InvSqrt: f(i) = 1.0 / std::sqrt(l); break;
    }
  }
  Matrix B = eig.vectors * f.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (B + B.transpose());
}

SvdResult thin_svd(const Matrix& A) {
  require_finite(A, "thin_svd");
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

}  // namespace ramopt::linalg
