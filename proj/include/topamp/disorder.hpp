#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "topamp/model.hpp"

namespace topamp {

// Stateless generator: every draw is a hash of (seed, realization, site).
double counter_uniform(std::uint64_t seed, std::uint64_t realization, std::uint64_t site);

struct EnsembleSpec {
    ModelParams base_params;
    double strength = 0.0;
    int n_realizations = 100;
    std::uint64_t seed = 0;
    double omega = 0.0;
    DisorderChannel channel = DisorderChannel::onsite;

    void validate() const;
};

DisorderOffsets sample_offsets(const EnsembleSpec& spec, int realization);

struct RealizationResult {
    int realization = 0;
    bool ok = false;
    double min_sv = 0.0;
    double second_sv = 0.0;
    std::string error;
};

struct EnsembleSpectrum {
    RVec mean_values;  // mean of the sorted singular values, per index
    std::vector<RealizationResult> realizations;
    int n_failed = 0;
};

EnsembleSpectrum ensemble_spectrum(const EnsembleSpec& spec, int threads = 0);

struct SplittingCurve {
    std::vector<double> strengths;
    std::vector<double> lowest_mean, lowest_stderr;
    std::vector<double> second_mean, second_stderr;
    std::vector<int> n_ok;
};

SplittingCurve splitting_curve(const ModelParams& base, double omega, const std::vector<double>& strengths,
                               int n_realizations, std::uint64_t seed, int threads = 0);

}  // namespace topamp
