#pragma once

#include <string>
#include <vector>

namespace gpx {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// 27 (s_tilde, xi, tau0) contour identity combinations at 1e-6 relative.
std::vector<CheckResult> contour_suite();

/// q = 1: unit transmission, vanishing Picard tail, Phi, energies, no eigenvalues.
std::vector<CheckResult> trivial_suite();

/// Soliton mass/momentum/energy/theta against closed forms at L=40, N=4096.
std::vector<CheckResult> soliton_invariants_suite();

/// h1 = momentum - theta mod 2*pi on seeded non-vanishing profiles.
std::vector<CheckResult> h1_suite(unsigned seed = 1234);

/// Schwarz symmetry of the direct transmission coefficient at random lambda.
std::vector<CheckResult> schwarz_suite(unsigned seed = 99);

/// Direct-ODE T^{-1} against e^{-int q1} sum T_2n on three profiles.
std::vector<CheckResult> pipeline_suite();

bool all_pass(const std::vector<CheckResult>& results);

} // namespace gpx
