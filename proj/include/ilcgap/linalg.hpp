#pragma once

#include <Eigen/Dense>

namespace ilcgap {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Spectral (induced 2-) norm, computed from a full SVD.
double spectral_norm(const Mat& m);

/// Smallest singular value; zero for empty or rank-deficient input.
double min_singular_value(const Mat& m);

/// σ_max / σ_min; +inf when singular.
double condition_number(const Mat& m);

/// (M + Mᵀ) / 2.
Mat symmetrized(const Mat& m);

/// Cholesky test on the symmetric part; requires the smallest eigenvalue to
/// exceed `tol` times the largest magnitude.
bool is_positive_definite(const Mat& m, double tol = 0.0);

/// Smallest real part over the (generally complex) spectrum.
double min_eigen_real_part(const Mat& m);

/// Solves m·x = rhs with full-pivot LU. Throws InternalError when `m` is
/// numerically singular.
Mat solve_dense(const Mat& m, const Mat& rhs);

/// Largest absolute entry.
double max_abs(const Mat& m);

}  // namespace ilcgap
