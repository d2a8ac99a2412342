#pragma once

#include <string>
#include <vector>

#include "gpx/util.hpp"

namespace gpx {

/// Uniform grid on [-L, L) with twisted-periodic continuation.
struct Grid {
    double half_length = 0.0; // L
    int n_points = 0;         // N, power of two, >= 16

    Grid() = default;
    Grid(double L, int N);

    double dx() const { return 2.0 * half_length / n_points; }
    double dxi() const { return pi / half_length; }
    double x(int j) const { return -half_length + j * dx(); }

    /// Signed frequency xi = pi*k/L for the FFT bin `idx` in natural order.
    double xi(int idx) const {
        int k = idx < n_points / 2 ? idx : idx - n_points;
        return pi * k / half_length;
    }

    bool operator==(const Grid& o) const {
        return half_length == o.half_length && n_points == o.n_points;
    }
};

/// Sampled complex field with q(x + 2L) = e^{i twist} q(x).
struct GridField {
    Grid grid;
    std::vector<cplx> v;
    double twist = 0.0;

    GridField() = default;
    GridField(Grid g, std::vector<cplx> samples, double theta_twist = 0.0);

    int n() const { return grid.n_points; }
    /// Sample extended through the boundary: q(L) = e^{i twist} q(-L).
    cplx at_wrapped(int j) const;
};

struct SobolevWeight {
    double s = 0.0;
    double tau = 2.0; // >= 2
    SobolevWeight(double s_, double tau_);
};

/// Ramp slope twist/(2L); the untwisted field is e^{-i slope x} q(x).
double ramp_slope(const GridField& f);

/// Periodic samples e^{-i twist x/(2L)} q(x).
std::vector<cplx> untwisted(const GridField& f);

/// Rebuild the twisted field from untwisted periodic samples.
GridField retwisted(const Grid& g, std::vector<cplx> untwisted_samples, double twist);

/// d/dx via the spectral derivative of the untwisted field plus the exact
/// ramp term. The result carries the same twist.
GridField spectral_derivative(const GridField& f);

/// Field resampled on the factor-times-finer grid (trigonometric in the
/// untwisted variable, exact ramp on the fine nodes).
GridField upsample_field(const GridField& f, int factor);

/// \hat f(xi_k) = (1/sqrt(2 pi)) int e^{-i xi_k x} f(x) dx on the raw samples,
/// returned in signed order k = -N/2 .. N/2-1. The caller untwists first if
/// the twist matters; decaying fields can be transformed as-is.
std::vector<cplx> dft(const GridField& f);

/// Frequencies matching dft() ordering.
std::vector<double> dft_frequencies(const Grid& g);

/// Frequency-side multiplication by (xi^2 + tau^2)^{s/2} on the untwisted field.
GridField apply_fractional(const GridField& f, const SobolevWeight& w);

/// ||f||_{H^s_tau} of a decaying field given by raw samples on g.
double h_norm_tau(const std::vector<cplx>& samples, const Grid& g, double s, double tau);

/// E^s_tau(q) = ( |||q|^2-1||_{H^{s-1}_tau}^2 + ||q'||_{H^{s-1}_tau}^2 )^{1/2}.
double e_s_tau(const GridField& q, double s, double tau);

/// ||j_tau * f||_{L^p}, j_tau = e^{tau x} on x<0; the W^{-1,p}_tau representative.
double w_minus1_p_norm(const GridField& f, double tau, double p);

/// d^s(p,q) with the closed-form inner phase infimum and trapezoid y-quadrature.
double metric_d_s(const GridField& p, const GridField& q, double s);

double l2_norm(const std::vector<cplx>& samples, const Grid& g);
double lp_norm(const std::vector<cplx>& samples, const Grid& g, double p);
double linf_norm(const std::vector<cplx>& samples);

/// Riemann sum (exact trapezoid for periodic data).
double integrate(const std::vector<double>& samples, const Grid& g);
cplx integrate(const std::vector<cplx>& samples, const Grid& g);

/// |q|^2 - 1 pointwise.
std::vector<cplx> density_defect(const GridField& q);

/// CSV dump `x,re_q,im_q` plus JSON sidecar {L, N, twist} at basename.{csv,json}.
void write_field(const GridField& f, const std::string& basename);
GridField read_field(const std::string& basename);

} // namespace gpx
