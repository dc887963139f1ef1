#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topamp/common.hpp"

namespace topamp {

enum class Boundary { open, periodic };

struct ModelParams {
    double delta = 0.0;
    double hop = 1.0;
    double phi = kPi / 2;
    double g_s = 1.0;
    double g_c = 1.0;
    double gamma = 4.0;
    double pump = 0.0;
    int n_sites = 12;
    // factor the energies were divided by when hop was normalized to 1
    double energy_unit = 1.0;

    void validate() const;
    // rescale every energy and rate so that hop == 1
    ModelParams normalized() const;
};

ModelParams canonical_params();
// P/J = 0.75, gamma/J = 4, g = 0.1 J
ModelParams double_hatano_nelson_params();

const char* to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

// Which coupling the random offsets perturb. Only on-site is used by default.
enum class DisorderChannel { onsite, hopping, loss, squeezing };

struct DisorderOffsets {
    std::vector<double> offsets;
    std::uint64_t seed = 0;
    int realization_index = 0;
    double strength = 0.0;
    DisorderChannel channel = DisorderChannel::onsite;
};

struct DynamicalMatrix {
    CMat entries;
    Boundary boundary = Boundary::open;
    ModelParams params;
    std::optional<DisorderOffsets> disorder;

    int n() const { return params.n_sites; }
};

DynamicalMatrix build_dynamical_matrix(const ModelParams& p, Boundary boundary = Boundary::open,
                                       const std::optional<DisorderOffsets>& disorder = std::nullopt);

RMat build_pump_matrix(const ModelParams& p, Boundary boundary = Boundary::open);

struct PumpDecomposition {
    RVec rates;     // descending
    CMat rotation;  // rows are the collective modes
    bool negative_rates = false;
};

PumpDecomposition pump_decomposition(const RMat& pump_matrix);

struct BlochMatrix {
    double k = 0.0;
    cplx f0, fx, fy, fz;
    CMat2 matrix;
};

BlochMatrix bloch_matrix(const ModelParams& p, double k);
// analytic d/dk of the Bloch matrix
CMat2 bloch_matrix_derivative(const ModelParams& p, double k);

struct DoubledMatrix {
    double omega = 0.0;
    CMat entries;
};

DoubledMatrix build_doubled_matrix(const CMat& h, double omega);
inline DoubledMatrix build_doubled_matrix(const DynamicalMatrix& h, double omega) {
    return build_doubled_matrix(h.entries, omega);
}
inline DoubledMatrix build_doubled_matrix(const BlochMatrix& h, double omega) {
    return build_doubled_matrix(CMat(h.matrix), omega);
}

// block-diagonal (+I, -I) of the given total dimension
CMat tau_z(Eigen::Index dim);

// Set a named parameter (delta, hop, phi, g_s, g_c, g, gamma, pump, n_sites, omega is not a model field).
void set_parameter(ModelParams& p, const std::string& name, double value);
bool is_model_parameter(const std::string& name);

}  // namespace topamp
