#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>

namespace fdsic {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

constexpr double kPi = 3.141592653589793238462643;
constexpr double kNegInfDb = -std::numeric_limits<double>::infinity();

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double db_to_amp(double db) { return std::pow(10.0, db / 20.0); }
inline double amp_to_db(double amp) { return 20.0 * std::log10(amp); }

}  // namespace fdsic
