#pragma once

#include <string>
#include <vector>

#include "topamp/model.hpp"

namespace topamp {

struct SingularSpectrum {
    double omega = 0.0;
    RVec values;  // ascending
    CMat left_vectors;
    CMat right_vectors;
    bool periodic = false;
};

// SVD of (omega - H); the doubled-matrix eigenvalues are checked against it unless cross_check is off.
SingularSpectrum singular_spectrum(const DynamicalMatrix& h, double omega, bool cross_check = true);

inline constexpr double kZeroModeThreshold = 1e-2;
inline constexpr double kStabilityEpsilon = 1e-9;

struct ZeroModeCensus {
    int count = 0;
    double gap = 0.0;  // +inf when every value is below threshold
    double threshold = kZeroModeThreshold;
};

ZeroModeCensus zero_mode_census(const SingularSpectrum& s, double threshold = kZeroModeThreshold);

struct SplittingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<int> sizes_used;
    std::vector<double> smallest;
    bool all_stable = true;
    std::vector<std::string> warnings;
};

SplittingFit splitting_decay_fit(const ModelParams& p, double omega, const std::vector<int>& sizes);

struct StabilityReport {
    double max_im_eigenvalue = 0.0;
    bool stable = true;
    CVec spectrum;
};

StabilityReport stability_report(const DynamicalMatrix& h, double epsilon = kStabilityEpsilon);

}  // namespace topamp
