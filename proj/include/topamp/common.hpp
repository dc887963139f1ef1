#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace topamp {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CMat2 = Eigen::Matrix2cd;
using CMat4 = Eigen::Matrix4cd;

inline constexpr cplx I1{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad inputs; the CLI maps these to exit code 2
struct ParameterError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct ConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

struct GapClosingError : NumericalError {
    GapClosingError(const std::string& what, double k_) : NumericalError(what), k(k_) {}
    double k;
};

struct DefectiveError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace topamp
