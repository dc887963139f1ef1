#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topamp/model.hpp"

namespace topamp {

// J_0(x) .. J_nmax(x) by downward recurrence normalised with J_0 + 2 sum J_2k = 1
std::vector<double> bessel_sequence(double x, int n_max);
double bessel_j(int n, double x);

struct LocalDriveSpec {
    double j_c = 1.0;
    double eta = 0.0;
    double delta_phi = 0.0;
    int n_max = 40;
    std::optional<double> carrier;  // resonator drive frequency, only used for warnings

    void validate() const;
};

struct CouplingDriveSpec {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    double phi_d = 0.0;
    std::optional<double> detuning;  // tone spacing, only used for warnings

    void validate() const;
};

double f_function(double eta, double delta_phi, int n_max = 40);

struct DriveMap {
    double hop = 0.0;
    double phi = 0.0;
    double g_s = 0.0;
    double g_c = 0.0;
    double raw_hop = 0.0;  // before absorbing the sign into phi
    double raw_phi = 0.0;
    double imag_residue = 0.0;
    int n_max_used = 0;
    std::string gauge_note;
    std::vector<std::string> warnings;

    // overwrite the coherent couplings, leaving delta, gamma, pump and n_sites alone
    void apply(ModelParams& p) const;
};

DriveMap local_drive_map(const LocalDriveSpec& spec);
DriveMap coupling_drive_map(const CouplingDriveSpec& spec);

}  // namespace topamp
