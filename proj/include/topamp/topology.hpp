#pragma once

#include <string>
#include <vector>

#include "topamp/model.hpp"

namespace topamp {

inline constexpr int kDefaultNk = 1024;
inline constexpr int kMaxNk = 1 << 20;

struct WindingResult {
    double raw = 0.0;  // before rounding, at the last grid used
    int value = 0;
    int n_k = 0;
};

// Chiral trace over the 4x4 doubled Bloch matrix, adaptively refined until within 1e-3 of an integer.
WindingResult winding_trace(const ModelParams& p, double omega, int n_k = kDefaultNk);
// Same integral on a fixed grid, no refinement.
double winding_trace_raw(const ModelParams& p, double omega, int n_k);
// (1/2 pi i) closed integral of tr[(omega - h)^-1 d(omega - h)]
double winding_trace_reduced_raw(const ModelParams& p, double omega, int n_k);

enum class Branch { plus, minus };

struct BandPath {
    ModelParams params;
    double omega = 0.0;
    std::vector<double> k_grid;  // n_k + 1 points from -pi to pi
    std::vector<cplx> e_plus, e_minus;
    bool swapped = false;
};

BandPath band_path(const ModelParams& p, double omega, int n_k = kDefaultNk);

struct BandWinding {
    int value = 0;
    double raw = 0.0;
    bool from_doubled_loop = false;
    int n_k = 0;
};

BandWinding winding_band_detail(const BandPath& path, double omega, Branch branch);
int winding_band(const BandPath& path, double omega, Branch branch);

struct SweepSpec {
    std::string name;
    double start = 0.0;
    double stop = 0.0;
    int count = 1;

    double value(int i) const;
    static SweepSpec parse(const std::string& text);  // name:start:stop:count
};

inline constexpr int kWindingSentinel = -999;

struct PhasePoint {
    double x = 0.0, y = 0.0;
    double w1_raw = 0.0;
    int w1 = kWindingSentinel;
    int w_plus = kWindingSentinel;
    int w_minus = kWindingSentinel;
    bool band_doubled = false;
    bool stable = false;
    double max_im_eig = 0.0;
    std::string error;
};

struct PhaseDiagramGrid {
    SweepSpec axis_x, axis_y;
    std::vector<PhasePoint> points;  // x fastest: index = iy * nx + ix

    const PhasePoint& at(int ix, int iy) const { return points[static_cast<size_t>(iy) * axis_x.count + ix]; }
};

PhaseDiagramGrid phase_diagram(const ModelParams& p, const SweepSpec& sx, const SweepSpec& sy, int n_k = kDefaultNk,
                               double omega = 0.0, int threads = 0);

// evaluate one phase-diagram point; never throws, errors go into PhasePoint::error
PhasePoint phase_point(const ModelParams& p, double omega, int n_k);

}  // namespace topamp
