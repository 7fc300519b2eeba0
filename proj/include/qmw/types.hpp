#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qmw {

using cplx = std::complex<double>;

using DenseMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Row-major so that row-wise assembly and twisted sums walk contiguous storage.
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<cplx>;

inline constexpr cplx kI{0.0, 1.0};

/// Minkowski metric diagonal, signature (+, -, ..., -).
inline constexpr double metric(int mu) { return mu == 0 ? 1.0 : -1.0; }

/// Largest entry modulus of a dense or sparse difference.
double max_abs(const DenseMatrix& a);
double max_abs(const SparseMatrix& a);

}  // namespace qmw
