#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpx/grid.hpp"
#include "gpx/regularize.hpp"

namespace gpx {

/// Point on the sheet of {z^2 = lambda^2 - 1} with Im z > 0.
struct SpectralParams {
    cplx lambda;
    cplx z;    // sqrt(lambda^2 - 1), Im z > 0
    cplx zeta; // lambda + z, upper half plane
    double tau = 0.0; // 2 Im z
};

SpectralParams make_params(cplx lambda);

/// Coefficients of the approximately diagonalized Lax equation.
struct CoefficientSet {
    enum class Variant { plus, minus }; // sign of Im(lambda)
    Variant variant = Variant::plus;
    Grid grid;
    std::vector<cplx> q1, q2, q3, q4;
    double kappa = 0.0; // measured min |den| / (|zeta_eff|^2 + |r|^2)
};

CoefficientSet coefficients(const GridField& q, const GridField& r, cplx lambda);

/// Picard terms T_0 = 1, T_2, T_4, ... of the renormalized Jost iteration.
/// Stops early once |T_2n| < 1e-14 |sum|; throws RegimeError if the measured
/// contraction factor exceeds rho_max.
std::vector<cplx> picard_terms(const CoefficientSet& c, const SpectralParams& sp, int n_max,
                               double rho_max = 0.9);

struct PhiResult {
    cplx value;
    cplx lattice;        // the ambiguity generator pi*i/(z*zeta)
    double tilde_defect; // residual of the (|q_tilde|^2-1) integrand, ~0
};

/// Phase correction Phi in the regularized four-integral form.
PhiResult phi_correction(const GridField& q, const GridField& r, const GridField& q_tilde,
                         const SpectralParams& sp);

/// Direct transmission coefficient by growth-normalized RK4 integration of the
/// Lax ODE, with step halving until the relative change is below tol.
cplx jost_transmission_direct(const GridField& q, cplx lambda, double tol = 1e-9);

/// Caches the upsampled field so lambda sweeps share the work. Refinement
/// extends the cached ladder on demand; not safe for concurrent t_inv calls.
class JostSolver {
public:
    explicit JostSolver(const GridField& q, int base_factor = 8);
    cplx t_inv(cplx lambda, double tol = 1e-9) const;
    double boundary_residual() const { return boundary_residual_; }

private:
    void extend(int factor) const;

    GridField q_;
    mutable int factor_;
    mutable std::vector<cplx> fine_; // factor*N + 1 samples, last one wrapped
    cplx q_left_, q_right_;
    double boundary_residual_ = 0.0;
};

struct ScatteringOptions {
    std::optional<double> tau_reg; // regularization scale; default 2 Im z, or a
                                   // ladder choice when 2 Im z < 2
    double delta0 = 0.05;          // small-tau smallness target for E0_{tau0}
    int n_max = 8;
    double rho_max = 0.9;
    bool want_direct = false; // also run the direct ODE solve
    bool want_ab = false;     // also evaluate the A+B decomposition
};

struct ScatteringResult {
    SpectralParams params;
    double tau_reg = 0.0;
    std::optional<cplx> t_inv; // direct-ODE value when requested
    std::vector<cplx> t2n;     // Picard terms (single-region route)
    cplx series_sum_minus_1 = 0.0;
    cplx phi = 0.0;  // -int q1 - i M/(2z) - i Theta/(2 z zeta) representative
    cplx ln_tc = 0.0;
    cplx tc_inv = 0.0;
    std::optional<cplx> a_term, b_term;
    long theta_branch = 0;
    std::string route; // "single_region" or "multi_region"
    double residual_boundary = 0.0;
    double residual_series_tail = 0.0;
    double residual_step_refine = 0.0;
};

ScatteringResult renormalized_transmission(const GridField& q, cplx lambda,
                                           const ScatteringOptions& opts = {});

/// A by frequency quadrature, B by exponential-kernel sweeps.
std::pair<cplx, cplx> ab_decomposition(const GridField& q, const GridField& r,
                                       const GridField& q_tilde, const SpectralParams& sp);

/// A by its defining double-integral sweeps; oracle for the frequency route.
cplx a_term_sweep(const GridField& q, const GridField& r, const SpectralParams& sp);

/// int_{x<y} e^{2iz(y-x)} f(x) g(y) dx dy by an exponential sweep with one
/// Richardson refinement.
cplx exp_pair_integral(const std::vector<cplx>& f, const std::vector<cplx>& g, const Grid& grid,
                       cplx two_i_z);

/// Auto tau ladder for the decoupled regularization scale: smallest tau0 in
/// {2, 4, 8, ...} with E0_{tau0}(q) <= delta0 (capped; throws RegimeError).
double small_tau_regularization_scale(const GridField& q, double delta0);

std::string scattering_to_json(const ScatteringResult& r);

} // namespace gpx
