#pragma once

#include <string>
#include <vector>

#include "topamp/greens.hpp"

namespace topamp {

struct OutputAmplitude {
    cplx signal;
    cplx idler;  // multiplies conj(alpha) at -omega_d
};

OutputAmplitude output_amplitude(const FiniteGreen& g, const ModelParams& p, int j, double omega_d);

double gain(const FiniteGreen& g, const ModelParams& p, int j);
double gain_semi_infinite(const SurfaceGreen& s, const ModelParams& p, int j);
double gain_semi_infinite(const ModelParams& p, int j, double omega);
// closed form for g_s = g_c = J, cos(phi) = 0, delta = 0, P = 0
double gain_closed_form(const ModelParams& p, int j, double omega);

inline constexpr double kNoiseCap = 1e12;

struct AmplifierPoint {
    int site = 0;
    double omega = 0.0;
    double gain = 0.0;
    double n_amp = 0.0;
    double n_add = 0.0;  // NaN when the gain underflows
    bool gain_underflow = false;

    double n_add_capped() const;
    bool capped() const;
};

AmplifierPoint added_noise(const FiniteGreen& g, const RMat& pump_matrix, const ModelParams& p, int j);

// sum over l of |G_{j,N+l}|^2 on the half-infinite chain, pump-free case only
double semi_infinite_noise(const ModelParams& p, int j, double omega);

struct QuadratureState {
    int site = 0;
    double omega = 0.0;
    double theta = 0.0;
    cplx mean_x, mean_p;
    double var_x = 1.0, var_p = 1.0;

    bool heisenberg_ok(double tol = 1e-9) const { return var_x * var_p >= 1 - tol; }
};

QuadratureState quadrature_state(const FiniteGreen& g, const RMat& pump_matrix, const ModelParams& p, int j,
                                 double theta);

enum class SqueezeClass { x_squeezed, p_squeezed, unsqueezed };
const char* to_string(SqueezeClass c);
SqueezeClass classify(const QuadratureState& q);

struct TrajectoryPoint {
    QuadratureState state;
    SqueezeClass cls = SqueezeClass::unsqueezed;
};

struct SiteTrajectory {
    int site = 0;
    std::vector<TrajectoryPoint> points;
};

std::vector<SiteTrajectory> squeezing_trajectory(const ModelParams& p, const std::vector<int>& sites,
                                                 const std::vector<double>& omega_grid, double theta = kPi / 4,
                                                 int threads = 0);

}  // namespace topamp
