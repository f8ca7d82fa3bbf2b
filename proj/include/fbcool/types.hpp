#pragma once

#include <complex>

#include <Eigen/Dense>

namespace fbcool {

using Real = double;
using Complex = std::complex<Real>;

using ArrayXr = Eigen::ArrayXd;
using ArrayXc = Eigen::ArrayXcd;
using VectorXr = Eigen::VectorXd;
using VectorXc = Eigen::VectorXcd;
using MatrixXr = Eigen::MatrixXd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr Real pi = 3.14159265358979323846;
inline constexpr Complex iu{0.0, 1.0};

}  // namespace fbcool
