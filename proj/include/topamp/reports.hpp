#pragma once

#include <vector>

#include "topamp/disorder.hpp"
#include "topamp/observables.hpp"
#include "topamp/table.hpp"
#include "topamp/topology.hpp"

namespace topamp {

// Tabular forms of each analysis, with the column layouts used for CSV output.

Table phase_diagram_table(const PhaseDiagramGrid& g);

Table spectrum_table(const ModelParams& p, Boundary boundary, const std::vector<double>& omegas, int threads = 0);

// zero, one or two sweeps over model parameters; rows in sweep order with the first axis fastest
Table stability_table(const ModelParams& p, Boundary boundary, const std::vector<SweepSpec>& sweeps, int threads = 0);

Table ensemble_table(const EnsembleSpec& spec, const EnsembleSpectrum& e);
Table splitting_table(const SplittingCurve& c);

Table amplifier_table(const ModelParams& p, const std::vector<int>& sites, const std::vector<double>& omegas,
                      int threads = 0, const FiniteGreenOptions& opt = {});

Table squeezing_table(const std::vector<SiteTrajectory>& traj, const std::vector<double>& omegas);

Table coherence_table(const ModelParams& p, const std::vector<double>& omegas, int threads = 0);

std::vector<double> grid_values(const SweepSpec& s);

}  // namespace topamp
