#pragma once

#include <optional>
#include <string>

#include "gpx/grid.hpp"

namespace gpx {

struct Profile {
    enum class Kind { constant_one, soliton, perturbed_background, soliton_plus_bump };
    Kind kind = Kind::constant_one;
    double c = 0.0;        // soliton speed in [-1, 1]
    cplx beta = 0.0;       // bump amplitude
    double width = 1.0;    // bump width, > 0
    double phase_ramp = 0.0;

    static Profile constant_one();
    static Profile soliton(double c);
    static Profile perturbed_background(cplx beta, double width, double phase_ramp);
    static Profile soliton_plus_bump(double c, cplx beta, double width);
};

struct ExactInvariants {
    double mass = 0.0;
    double momentum = 0.0;
    double energy = 0.0;
    double theta = 0.0; // in [0, 2*pi)
    std::optional<double> eigenvalue_hint; // filled numerically by the eigen module
};

/// Samples the profile at time t. Soliton twists are set to -Theta(c) so the
/// untwisted field is periodic; the boundary residual is checked at 1e-10.
GridField sample(const Profile& p, const Grid& g, double t = 0.0);

/// Closed forms for soliton / constant_one; throws for perturbed kinds.
ExactInvariants exact_invariants(const Profile& p);

Profile profile_from_json(const std::string& text);
std::string profile_to_json(const Profile& p);

/// Product of two displaced soliton profiles; an approximate two-soliton
/// configuration for spectral tests, not an exact solution.
GridField composite_soliton(const Grid& g, double c1, double x1, double c2, double x2);

} // namespace gpx
