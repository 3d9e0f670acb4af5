#include "ilcgap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ilcgap/errors.hpp"

namespace ilcgap {

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double min_singular_value(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() < std::min(m.rows(), m.cols())) return 0.0;
  return s(s.size() - 1);
}

double condition_number(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / lo;
}

Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

bool is_positive_definite(const Mat& m, double tol) {
  if (m.rows() != m.cols() || m.size() == 0) return false;
  if (!m.allFinite()) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  const auto& ev = es.eigenvalues();
  const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return ev(0) > tol * scale;
}

double min_eigen_real_part(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m, false);
  return es.eigenvalues().real().minCoeff();
}

Mat solve_dense(const Mat& m, const Mat& rhs) {
  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw InternalError("solve_dense: singular matrix");
  return lu.solve(rhs);
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace ilcgap
