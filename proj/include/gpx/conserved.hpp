#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpx/grid.hpp"
#include "gpx/regularize.hpp"

namespace gpx {

/// M = int (|q|^2 - 1) dx.
double mass(const GridField& q);

/// P = Im int q dq/dx-bar dx; meaningful for fields with a spectral derivative.
double momentum(const GridField& q);

/// Asymptotic phase change: minus the winding of the given unimodular field,
/// including the boundary step through the twist.
ModValue winding_theta(const GridField& q_tilde);

/// Theta(q) through the non-vanishing reference built at scale tau.
ModValue theta(const GridField& q, double tau);

/// Renormalized momentum via the reference field; equals P - Theta mod 2*pi on
/// smooth non-vanishing profiles.
ModValue h1(const GridField& q, double tau);
ModValue h1_with_reference(const GridField& q, const GridField& q_tilde);

/// H3 = Im int (q' qbar'' + 3(|q|^2-1) q qbar') dx - P.
double h3_diagnostic(const GridField& q);

struct ConservedReport {
    double mass = 0.0;
    std::optional<double> momentum;
    ModValue theta;
    ModValue h1;
    std::vector<std::string> notes;
};

ConservedReport conserved_report(const GridField& q, double tau);
std::string report_to_json(const ConservedReport& r);

} // namespace gpx
