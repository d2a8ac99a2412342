#pragma once

#include <functional>
#include <map>
#include <optional>

#include "gpx/grid.hpp"
#include "gpx/scattering.hpp"

namespace gpx {

struct EnergyQuadratureConfig {
    double tau_max = 0.0;  // 0 = auto: max(4*tau0, 240) for field integrands
    int n_nodes = 192;     // >= 64; Gauss-Legendre nodes on geometric panels
    double t_min_rel = 1e-7;
    std::optional<double> tail_exponent; // fitted on the last decade if unset
    double tail_max_fraction = 0.01;
    int gl_order = 12;
};

/// Shared Re ln T_c^{-1} ladder: one scattering solve per tau node, reused
/// across every s-quadrature on the same field.
class TcLadder {
public:
    TcLadder(const GridField& q, ScatteringOptions opts = {});
    /// tau^2 Re ln T_c^{-1}(i sqrt(tau^2/4-1)) + tau (E^0_tau)^2
    double bracket(double tau);
    double re_ln_tc(double tau);
    const GridField& field() const { return *q_; }

private:
    const GridField* q_;
    ScatteringOptions opts_;
    std::map<double, double> re_ln_, e0sq_;
};

/// E^0_tau(q) = -tau Re ln T_c^{-1}(i sqrt(tau^2/4 - 1)).
double conserved_e0(const GridField& q, double tau, const ScatteringOptions& opts = {});

struct EnergyResult {
    double value = 0.0;
    double quad_error = 0.0;
    double tail_fraction = 0.0;
    int nodes = 0;
};

/// The conserved energy E^s_tau0 for s in (0,2); s = 1 returns (E^1)^2 exactly.
/// Internally integrates the defect bracket against the contour weight and adds
/// the exact (E^s_tau0)^2 squared norm, which the contour identity makes
/// equivalent to the direct tau-quadrature of tau^2 Re ln T_c^{-1}.
EnergyResult conserved_es(const GridField& q, double s, double tau0,
                          const EnergyQuadratureConfig& cfg = {}, TcLadder* ladder = nullptr);

/// Direct quadrature of the defining display, without the defect split; used
/// to validate the split where its tail is thin.
EnergyResult conserved_es_direct(const GridField& q, double s, double tau0,
                                 const EnergyQuadratureConfig& cfg = {}, TcLadder* ladder = nullptr);

/// Contour identity: lhs by the module quadrature engine, rhs closed form.
/// s_tilde in (-1,0) uses the plain kernel; [0,1) the subtracted kernel with
/// the tau0^{2 s_tilde} boundary term.
std::pair<double, double> contour_identity_check(double s_tilde, double xi, double tau0,
                                                 const EnergyQuadratureConfig& cfg = {});

struct EnergyBoundReport {
    cplx even_part;     // (ln Tc(lambda) + conj ln Tc(-conj lambda)) / 2
    cplx freq_integral; // (i/2z) int (|q'|^2 + |m|^2)^ / (xi^2 - 4z^2) dxi
    double residual = 0.0;
};

/// Termwise check of the even-part energy estimate at one lambda.
EnergyBoundReport verify_energy_bound(const GridField& q, cplx lambda,
                                      const ScatteringOptions& opts = {});

struct OddPartReport {
    cplx odd_part;          // (ln Tc(lambda) - conj ln Tc(-conj lambda)) / (2i)
    cplx frequency_term;    // the |q'|^2 frequency integral
    cplx reference_term;    // (lambda-z)/(2z) Im int (rbar r' - qtilde'/qtilde)
    cplx cubic_term;        // (lambda-z)^2/(4z^2) Im int (|r|^2-1) rbar r'
    cplx double_term_rrp;   // kernel integrals against Im[r rbar']
    cplx double_term_qr;    // kernel integrals against Im[rbar(q-r)]
    double residual = 0.0;
};

/// Termwise evaluation of the odd-part display on non-vanishing profiles.
OddPartReport lowmomentae_residual(const GridField& q, cplx lambda,
                                   const ScatteringOptions& opts = {});

/// Quadrature engine used by the checks above:
/// int_{tau0}^inf (tau^2 - tau0^2)^{s_tilde} tau g(tau) dtau.
EnergyResult contour_integral(double s_tilde, double tau0, const std::function<double(double)>& g,
                              const EnergyQuadratureConfig& cfg);

} // namespace gpx
