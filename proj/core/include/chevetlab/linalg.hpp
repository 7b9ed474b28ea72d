#pragma once

#include <vector>

#include "chevetlab/common.hpp"

namespace chevetlab {

/// Largest singular value. Closed forms for vectors and 2x2 blocks, a
/// self-adjoint eigen-solve of the smaller Gram matrix up to 32, SVD beyond.
double spectral_norm(const Eigen::Ref<const Matrix>& a);

struct TopSingular {
  double value = 0.0;
  Vector left;   // unit, length rows
  Vector right;  // unit, length cols
};

/// Leading singular triple with a deterministic sign (largest-magnitude
/// entry of `right` is positive).
TopSingular top_singular(const Eigen::Ref<const Matrix>& a);

/// Gathers a(rows, cols) into `out`.
void gather(const Eigen::Ref<const Matrix>& a, const std::vector<int>& rows,
            const std::vector<int>& cols, Matrix& out);

}  // namespace chevetlab
