#pragma once

#include <utility>

#include "topamp/model.hpp"

namespace topamp {

// Edge from which an excitation is amplified. Amplifier site j sits at physical index
// j (left) or N-1-j (right).
enum class InputEdge { left, right };

struct PropagationFrame {
    InputEdge edge = InputEdge::left;
    CMat2 forward;   // hopping block H_{next, current} along the propagation direction
    CMat2 backward;
    bool forward_is_plus = false;  // forward equals v_plus

    int physical(int j, int n) const { return edge == InputEdge::left ? j : n - 1 - j; }
};

// Decided once per parameter set (cached): compares end-to-end transmission both ways on a probe chain.
PropagationFrame propagation_frame(const ModelParams& p);

struct FiniteGreenOptions {
    double max_condition = 1e12;
};

struct FiniteGreen {
    double omega = 0.0;
    CMat matrix;
    int n_sites = 0;
    double condition = 0.0;
    double residual = 0.0;
    PropagationFrame frame;

    // indices are amplifier-frame sites
    cplx normal(int j, int l) const { return matrix(p(j), p(l)); }
    cplx anomalous(int j, int l) const { return matrix(p(j), n_sites + p(l)); }
    cplx lower_normal(int j, int l) const { return matrix(n_sites + p(j), p(l)); }
    CMat2 block(int j, int l) const;
    int p(int j) const { return frame.physical(j, n_sites); }
};

FiniteGreen finite_green(const DynamicalMatrix& h, double omega, const FiniteGreenOptions& opt = {});
FiniteGreen finite_green(const DynamicalMatrix& h, double omega, const PropagationFrame& frame,
                         const FiniteGreenOptions& opt = {});

CMat2 bare_site_green(const ModelParams& p, double omega);
CMat2 bare_site_inverse(const ModelParams& p, double omega);

struct HoppingMatrices {
    CMat2 v_plus, v_minus;
};
HoppingMatrices hopping_matrices(const ModelParams& p);

enum class SurfaceSolver { finite_size_limit, fixed_point };

struct SurfaceGreen {
    double omega = 0.0;
    CMat2 g00;
    CMat2 G00;
    CMat2 v_plus, v_minus;
    PropagationFrame frame;
    double residual = 0.0;
    int iterations = 0;
    SurfaceSolver solver = SurfaceSolver::finite_size_limit;
    bool validated = true;  // fixed point cross-checked against the finite-size limit
};

inline constexpr int kSurfaceMaxSites = 512;

SurfaceGreen surface_green(const ModelParams& p, double omega, SurfaceSolver solver = SurfaceSolver::finite_size_limit);
// residual of the decimation equation in the propagation frame
double surface_residual(const CMat2& G, const CMat2& g00, const PropagationFrame& f);

struct SpectralSplit {
    cplx lambda_plus, lambda_minus;  // |lambda_plus| >= |lambda_minus|
    CMat2 p_plus, p_minus;
    cplx zeta_plus, zeta_minus;      // log lambda; real part -inf for lambda = 0
};

SpectralSplit spectral_split(const CMat2& m);

// m^n via the split; n = 0 gives the identity
CMat2 split_power(const SpectralSplit& s, int n);

struct CoherenceLengths {
    cplx zeta_plus, zeta_minus;
    SpectralSplit forward;
    SpectralSplit backward;
};

CoherenceLengths coherence_lengths(const ModelParams& p, double omega);

CMat2 semi_infinite_green(const SurfaceGreen& s, int j, int l);
CMat2 semi_infinite_green(const ModelParams& p, double omega, int j, int l);

}  // namespace topamp
