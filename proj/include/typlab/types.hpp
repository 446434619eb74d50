#pragma once

#include <complex>

#include <Eigen/Dense>

namespace typlab {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerance for identities that hold exactly in exact arithmetic.
inline constexpr double kExactTol = 1e-12;
/// Tolerance for identities that pass through a matrix inverse.
inline constexpr double kInverseTol = 1e-10;

}  // namespace typlab
