#include "gpx/checks.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gpx/conserved.hpp"
#include "gpx/eigenvalues.hpp"
#include "gpx/energies.hpp"
#include "gpx/profiles.hpp"
#include "gpx/scattering.hpp"

namespace gpx {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

CheckResult near(const std::string& name, double got, double want, double tol) {
    CheckResult r;
    r.name = name;
    r.pass = std::abs(got - want) <= tol;
    r.detail = "got " + std::to_string(got) + ", want " + std::to_string(want) +
               ", |err| = " + fmt(std::abs(got - want)) + " vs tol " + fmt(tol);
    return r;
}

} // namespace

bool all_pass(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

std::vector<CheckResult> contour_suite() {
    std::vector<CheckResult> out;
    const double s_grid[3] = {-0.5, -0.25, 0.5};
    const double xi_grid[3] = {0.0, 1.0, 3.0};
    const double tau_grid[3] = {2.0, 3.0, 4.0};
    for (double st : s_grid)
        for (double xi : xi_grid)
            for (double tau0 : tau_grid) {
                auto [lhs, rhs] = contour_identity_check(st, xi, tau0);
                CheckResult r;
                std::ostringstream name;
                name << "contour s~=" << st << " xi=" << xi << " tau0=" << tau0;
                r.name = name.str();
                double rel = std::abs(lhs - rhs) / std::abs(rhs);
                r.pass = rel <= 1e-6;
                r.detail = "lhs " + std::to_string(lhs) + " rhs " + std::to_string(rhs) +
                           " rel " + fmt(rel);
                out.push_back(r);
            }
    return out;
}

std::vector<CheckResult> trivial_suite() {
    std::vector<CheckResult> out;
    Grid g(40.0, 1024);
    GridField one = sample(Profile::constant_one(), g);
    cplx lambdas[3] = {cplx(0.0, 2.0), cplx(0.5, 0.8), cplx(-0.3, -1.1)};
    for (cplx lam : lambdas) {
        cplx t = jost_transmission_direct(one, lam);
        out.push_back(near("trivial T^-1 at lambda=(" + std::to_string(lam.real()) + "," +
                               std::to_string(lam.imag()) + ")",
                           std::abs(t - 1.0), 0.0, 1e-12));
    }
    auto res = renormalized_transmission(one, cplx(0.0, 2.0));
    out.push_back(near("trivial Tc^-1", std::abs(res.tc_inv - 1.0), 0.0, 1e-12));
    out.push_back(near("trivial Phi", std::abs(res.phi), 0.0, 1e-12));
    double tail = 0.0;
    for (std::size_t n = 1; n < res.t2n.size(); ++n) tail += std::abs(res.t2n[n]);
    out.push_back(near("trivial Picard tail", tail, 0.0, 1e-12));
    out.push_back(near("trivial E0_8", conserved_e0(one, 8.0), 0.0, 1e-12));
    auto es = conserved_es(one, 0.5, 2.0);
    out.push_back(near("trivial curly-E^0.5_2", es.value, 0.0, 1e-12));
    auto eigs = lax_eigs(one, {-0.9, 0.9});
    out.push_back(near("trivial eigenvalue count", static_cast<double>(eigs.size()), 0.0, 0.1));
    return out;
}

std::vector<CheckResult> soliton_invariants_suite() {
    std::vector<CheckResult> out;
    Grid g(40.0, 4096);
    const double cs[7] = {0.0, 0.3, -0.3, 0.5, -0.5, 0.9, -0.9};
    for (double c : cs) {
        GridField q = sample(Profile::soliton(c), g);
        ExactInvariants ex = exact_invariants(Profile::soliton(c));
        std::string tag = " c=" + std::to_string(c);
        out.push_back(near("mass" + tag, mass(q), ex.mass, 1e-6));
        out.push_back(near("momentum" + tag, momentum(q), ex.momentum, 1e-6));
        double e1 = e_s_tau(q, 1.0, 2.0);
        out.push_back(near("energy" + tag, e1 * e1, ex.energy, 1e-6));
        ModValue th = theta(q, 4.0);
        out.push_back(near("theta" + tag, circ_dist(th.value, ex.theta), 0.0, 1e-6));
    }
    return out;
}

std::vector<CheckResult> h1_suite(unsigned seed) {
    std::vector<CheckResult> out;
    Grid g(40.0, 2048);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(0.02, 0.25), wid(1.0, 4.0), ph(-2.5, 2.5);
    for (int i = 0; i < 10; ++i) {
        cplx beta = std::polar(amp(rng), ph(rng));
        Profile p = Profile::perturbed_background(beta, wid(rng), ph(rng));
        GridField q = sample(p, g);
        auto ref = nonvanishing_reference(q, 4.0);
        ModValue th = winding_theta(ref.q_tilde);
        ModValue h = h1_with_reference(q, ref.q_tilde);
        double want = momentum(q) - th.raw();
        CheckResult r = near("h1 identity #" + std::to_string(i),
                             circ_dist(h.value, mod_2pi(want)), 0.0, 1e-7);
        out.push_back(r);
    }
    return out;
}

std::vector<CheckResult> schwarz_suite(unsigned seed) {
    std::vector<CheckResult> out;
    Grid g(40.0, 2048);
    GridField q = sample(Profile::perturbed_background(cplx(0.15, -0.1), 2.0, 0.0), g);
    JostSolver solver(q);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-1.5, 1.5), im(0.2, 2.0);
    for (int i = 0; i < 10; ++i) {
        cplx lam(re(rng), im(rng));
        cplx a = solver.t_inv(lam);
        cplx b = solver.t_inv(std::conj(lam));
        out.push_back(near("schwarz #" + std::to_string(i), std::abs(b - std::conj(a)), 0.0, 1e-8));
    }
    return out;
}

std::vector<CheckResult> pipeline_suite() {
    std::vector<CheckResult> out;
    Grid g(40.0, 2048);
    GridField profiles_[3] = {
        sample(Profile::perturbed_background(cplx(0.1, 0.05), 2.0, 0.0), g),
        sample(Profile::perturbed_background(cplx(-0.08, 0.12), 3.0, 1.1), g),
        sample(Profile::soliton(0.5), g),
    };
    const char* names[3] = {"bump", "ramped bump", "soliton(0.5)"};
    cplx lams[6] = {cplx(0.0, 1.5), cplx(0.0, 0.9), cplx(0.4, 1.2),
                    cplx(-0.6, 0.8), cplx(0.2, 2.5), cplx(0.0, 4.0)};
    for (int ip = 0; ip < 3; ++ip) {
        JostSolver solver(profiles_[ip]);
        for (cplx lam : lams) {
            ScatteringOptions opts;
            opts.n_max = 48;
            if (ip == 2) opts.rho_max = 1.5; // soliton sits near the contraction margin
            auto res = renormalized_transmission(profiles_[ip], lam, opts);
            // e^{-int q1} sum T_2n == T^{-1}, compared through the Tc assembly
            cplx direct = solver.t_inv(lam, 1e-10);
            SpectralParams sp = res.params;
            cplx i(0.0, 1.0);
            cplx via_series = res.tc_inv;
            auto ref = nonvanishing_reference(profiles_[ip], res.tau_reg);
            double theta_raw = winding_theta(ref.q_tilde).raw();
            cplx tc_direct = direct * std::exp(-i * mass(profiles_[ip]) / (2.0 * sp.z) -
                                               i * theta_raw / (2.0 * sp.z * sp.zeta));
            std::ostringstream nm;
            nm << "pipeline " << names[ip] << " lambda=(" << lam.real() << "," << lam.imag() << ")";
            out.push_back(
                near(nm.str(), std::abs(via_series - tc_direct), 0.0, 1e-6 * std::abs(tc_direct)));
        }
    }
    return out;
}

} // namespace gpx
