#pragma once

#include <gtest/gtest.h>

#include <random>

#include "topamp/model.hpp"

namespace th {

using topamp::cplx;

inline ::testing::AssertionResult close(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return ::testing::AssertionFailure() << "shape mismatch";
    const double d = (a - b).cwiseAbs().maxCoeff();
    if (d <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << "max deviation " << d << "\n" << a << "\nvs\n" << b;
}

inline ::testing::AssertionResult close(cplx a, cplx b, double tol) {
    if (std::abs(a - b) <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << a << " vs " << b;
}

// random parameter sets inside the physical domain
inline topamp::ModelParams random_params(std::mt19937_64& rng, int n = 6) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    topamp::ModelParams p;
    p.delta = 2 * u(rng) - 1;
    p.phi = 2 * topamp::kPi * u(rng);
    p.g_s = 1.5 * u(rng);
    p.g_c = 1.5 * u(rng);
    p.gamma = 6 * u(rng);
    p.pump = 0.8 * u(rng);
    p.n_sites = n;
    return p;
}

inline topamp::ModelParams decoupled(double gamma) {
    topamp::ModelParams p;
    p.hop = 1e-14;
    p.g_s = p.g_c = 0.0;
    p.gamma = gamma;
    p.phi = 0.0;
    return p;
}

}  // namespace th
