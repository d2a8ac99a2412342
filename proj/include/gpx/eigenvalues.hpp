#pragma once

#include <utility>
#include <vector>

#include "gpx/grid.hpp"

namespace gpx {

/// Eigenvalues of the discretized Lax operator inside the band (subset of
/// (-1,1)), via a dense Hermitian solve on the 2N x 2N spectral discretization.
std::vector<double> lax_eigs(const GridField& q, std::pair<double, double> band);

/// Real zeros of T_c^{-1} in the band, located by sign changes of the
/// phase-aligned real samples and refined by bisection.
std::vector<double> tc_zeros(const GridField& q, std::pair<double, double> band,
                             double resolution = 1e-7, int n_scan = 160);

struct EigenReport {
    std::vector<double> operator_eigs;
    std::vector<double> tc_zero_locations;
    std::vector<std::pair<double, double>> pairing;
    double hausdorff = 0.0;
};

EigenReport eigen_report(const GridField& q, std::pair<double, double> band,
                         double resolution = 1e-7);

std::string eigen_report_to_json(const EigenReport& r);

} // namespace gpx
