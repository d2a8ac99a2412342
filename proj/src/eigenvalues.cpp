#include "gpx/eigenvalues.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <lapacke.h>

#include "gpx/errors.hpp"
#include "gpx/fft.hpp"
#include "gpx/scattering.hpp"
#include "json.hpp"
#include "gpx/conserved.hpp"

namespace gpx {

std::vector<double> lax_eigs(const GridField& q, std::pair<double, double> band) {
    const Grid& g = q.grid;
    const int n = g.n_points;
    const double margin = std::max(2.0 * g.dxi(), 0.01);
    const double lo = std::max(band.first, -1.0 + margin);
    const double hi = std::min(band.second, 1.0 - margin);
    if (!(lo < hi)) throw InvalidInputError("lax_eigs: empty band after margin clamp");

    // circulant of i d/dx: row offsets from the real symbol -xi_k
    std::vector<cplx> sym(n);
    for (int k = 0; k < n; ++k) sym[k] = -g.xi(k);
    ifft(sym); // sym[m] = D_{j, j-m}

    const double shift = q.twist / (4.0 * g.half_length); // half-ramp diagonal term
    std::vector<cplx> qu = untwisted(q);

    const int m = 2 * n;
    std::vector<cplx> a(static_cast<std::size_t>(m) * m, cplx(0.0, 0.0));
    auto at = [&](int row, int col) -> cplx& { return a[static_cast<std::size_t>(col) * m + row]; };
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            cplx d = sym[(j - l + n) % n];
            at(j, l) = d;
            at(n + j, n + l) = -d;
        }
        at(j, j) -= shift;
        at(n + j, n + j) -= shift;
        at(j, n + j) = cplx(0.0, -1.0) * qu[j];
        at(n + j, j) = cplx(0.0, 1.0) * std::conj(qu[j]);
    }
    double herm = 0.0;
    for (int j = 0; j < m; ++j)
        for (int l = 0; l <= j; ++l) herm = std::max(herm, std::abs(at(j, l) - std::conj(at(l, j))));
    if (herm > 1e-12) throw Error("lax_eigs: assembled operator is not Hermitian");

    std::vector<double> w(m);
    int info = LAPACKE_zheev(LAPACK_COL_MAJOR, 'N', 'L', m,
                             reinterpret_cast<lapack_complex_double*>(a.data()), m, w.data());
    if (info != 0) throw Error("lax_eigs: zheev failed with info " + std::to_string(info));

    std::vector<double> out;
    for (double lam : w)
        if (lam >= lo && lam <= hi) out.push_back(lam);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> tc_zeros(const GridField& q, std::pair<double, double> band, double resolution,
                             int n_scan) {
    const double margin = std::max(2.0 * q.grid.dxi(), 0.01);
    const double lo = std::max(band.first, -1.0 + margin);
    const double hi = std::min(band.second, 1.0 - margin);
    if (!(lo < hi)) throw InvalidInputError("tc_zeros: empty band after margin clamp");

    ScatteringOptions opts;
    opts.tau_reg = small_tau_regularization_scale(q, opts.delta0);
    opts.n_max = 48;

    // Tc^-1 is real on (-1,1): the mass/phase renormalization cancels the
    // twist phase the bare transmission coefficient carries.
    auto value = [&](double lam) -> double {
        cplx tc = renormalized_transmission(q, cplx(lam, 0.0), opts).tc_inv;
        if (std::abs(tc.imag()) > 1e-6 * std::max(1.0, std::abs(tc)))
            throw BranchError("tc_zeros: imaginary residue " + std::to_string(tc.imag()) +
                              " on the real band");
        return tc.real();
    };

    std::vector<double> xs(n_scan), vs(n_scan);
    for (int i = 0; i < n_scan; ++i) {
        xs[i] = lo + (hi - lo) * i / (n_scan - 1);
        vs[i] = value(xs[i]);
    }
    std::vector<double> zeros;
    for (int i = 0; i + 1 < n_scan; ++i) {
        if (vs[i] == 0.0) {
            zeros.push_back(xs[i]);
            continue;
        }
        if (vs[i] * vs[i + 1] < 0.0) {
            double a = xs[i], b = xs[i + 1], fa = vs[i];
            while (b - a > resolution) {
                double c = 0.5 * (a + b);
                double fc = value(c);
                if (fc == 0.0) {
                    a = b = c;
                    break;
                }
                if (fa * fc < 0.0) {
                    b = c;
                } else {
                    a = c;
                    fa = fc;
                }
            }
            zeros.push_back(0.5 * (a + b));
        }
    }
    return zeros;
}

EigenReport eigen_report(const GridField& q, std::pair<double, double> band, double resolution) {
    EigenReport rep;
    rep.operator_eigs = lax_eigs(q, band);
    rep.tc_zero_locations = tc_zeros(q, band, resolution);
    double h = 0.0;
    for (double z : rep.tc_zero_locations) {
        double best = 1e300, mate = 0.0;
        for (double e : rep.operator_eigs)
            if (std::abs(e - z) < best) {
                best = std::abs(e - z);
                mate = e;
            }
        rep.pairing.emplace_back(z, mate);
        h = std::max(h, best);
    }
    for (double e : rep.operator_eigs) {
        double best = 1e300;
        for (double z : rep.tc_zero_locations) best = std::min(best, std::abs(e - z));
        h = std::max(h, best);
    }
    rep.hausdorff = rep.operator_eigs.empty() && rep.tc_zero_locations.empty() ? 0.0 : h;
    return rep;
}

std::string eigen_report_to_json(const EigenReport& r) {
    nlohmann::json j;
    j["operator_eigs"] = r.operator_eigs;
    j["tc_zeros"] = r.tc_zero_locations;
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : r.pairing) pairs.push_back({p.first, p.second});
    j["pairing"] = pairs;
    j["hausdorff"] = r.hausdorff;
    return j.dump();
}

} // namespace gpx
