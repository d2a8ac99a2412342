#pragma once

#include <string>
#include <vector>

#include "gpx/conserved.hpp"
#include "gpx/grid.hpp"

namespace gpx {

struct EvolveConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    std::vector<cplx> probe_lambdas; // T_c^{-1} probes per report
    int report_every = 100;          // steps between samples
    double safety = 2.0;             // dt <= safety * dx^2
    double e0_tau = 8.0;             // tau for the E^0 column
    double conserved_tau = 4.0;      // tau for theta / h1
    bool track_conserved = true;     // theta, h1, E^0, probes per report
};

/// One Strang step: half nonlinear, exact linear, half nonlinear.
GridField step(const GridField& q, double dt);

struct TrajectorySample {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0; // (E^1)^2
    ModValue theta, h1;
    double e0_tau = 0.0;
    std::vector<cplx> tc;
    bool boundary_flag = false;
};

struct TrajectoryReport {
    std::vector<TrajectorySample> rows;
    GridField final_state;
    bool boundary_flagged = false;
    std::string csv() const;
};

TrajectoryReport run(const GridField& q0, const EvolveConfig& cfg);

} // namespace gpx
