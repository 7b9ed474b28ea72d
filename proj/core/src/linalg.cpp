#include "chevetlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace chevetlab {

double spectral_norm(const Eigen::Ref<const Matrix>& a) {
  const Index r = a.rows();
  const Index c = a.cols();
  if (r == 0 || c == 0) return 0.0;
  if (r == 1 || c == 1) return a.norm();
  if (r == 2 && c == 2) {
    const double p = a(0, 0), q = a(0, 1), s = a(1, 0), t = a(1, 1);
    const double fro = p * p + q * q + s * s + t * t;
    const double det = p * t - q * s;
    const double disc = std::sqrt(std::max(0.0, fro * fro - 4.0 * det * det));
    return std::sqrt(0.5 * (fro + disc));
  }
  const Index small = std::min(r, c);
  if (small <= 32) {
    Matrix gram = r <= c ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues()(small - 1)));
  }
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

TopSingular top_singular(const Eigen::Ref<const Matrix>& a) {
  TopSingular out;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.value = svd.singularValues()(0);
  out.left = svd.matrixU().col(0);
  out.right = svd.matrixV().col(0);
  Index imax = 0;
  out.right.cwiseAbs().maxCoeff(&imax);
  if (out.right(imax) < 0.0) {
    out.left = -out.left;
    out.right = -out.right;
  }
  return out;
}

void gather(const Eigen::Ref<const Matrix>& a, const std::vector<int>& rows,
            const std::vector<int>& cols, Matrix& out) {
  out.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      out(static_cast<Index>(i), static_cast<Index>(j)) = a(rows[i], cols[j]);
}

}  // namespace chevetlab
