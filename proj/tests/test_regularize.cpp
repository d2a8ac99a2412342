#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gpx/conserved.hpp"
#include "gpx/errors.hpp"
#include "gpx/profiles.hpp"
#include "gpx/regularize.hpp"

using namespace gpx;

TEST_CASE("regularize: constant, single mode, L2 convergence in tau") {
    Grid g(20.0, 512);
    GridField one = sample(Profile::constant_one(), g);
    GridField r1 = regularize(one, 4.0);
    for (const auto& z : r1.v) CHECK(std::abs(z - 1.0) < 1e-13);
    CHECK_THROWS_AS(regularize(one, 1.0), DomainError);

    double xi1 = pi / g.half_length;
    std::vector<cplx> v(g.n_points);
    for (int j = 0; j < g.n_points; ++j) v[j] = std::exp(cplx(0.0, xi1 * g.x(j)));
    GridField mode(g, v, 0.0);
    double tau = 3.0;
    GridField rm = regularize(mode, tau);
    double factor = tau * tau / (xi1 * xi1 + tau * tau);
    for (int j = 0; j < g.n_points; ++j) CHECK(std::abs(rm.v[j] - factor * mode.v[j]) < 1e-12);

    GridField q = sample(Profile::soliton(0.0), g);
    double prev = 1e300;
    for (double t : {2.0, 4.0, 8.0, 16.0, 32.0}) {
        GridField r = regularize(q, t);
        std::vector<cplx> diff(g.n_points);
        for (int j = 0; j < g.n_points; ++j) diff[j] = q.v[j] - r.v[j];
        double err = l2_norm(diff, g);
        CHECK(err < prev);
        prev = err;
    }
    // matches tau^2 apply_fractional(s=-2)
    GridField r = regularize(q, 4.0);
    GridField alt = apply_fractional(q, SobolevWeight(-2.0, 4.0));
    for (int j = 0; j < g.n_points; ++j)
        CHECK(std::abs(r.v[j] - 16.0 * alt.v[j]) < 1e-12);
}

TEST_CASE("dip intervals: none, tanh, two dips, boundary rejection") {
    Grid g(40.0, 2048);
    GridField q9 = sample(Profile::soliton(0.9), g);
    CHECK(find_dip_intervals(regularize(q9, 8.0)).empty());

    GridField black = sample(Profile::soliton(0.0), g);
    auto dips = find_dip_intervals(regularize(black, 8.0));
    REQUIRE(dips.size() == 1);
    CHECK(dips[0].a < 0.0);
    CHECK(dips[0].b > 0.0);

    // two separated zeros
    GridField two = composite_soliton(g, 0.0, -7.0, 0.0, 7.0);
    auto dips2 = find_dip_intervals(regularize(two, 8.0));
    REQUIRE(dips2.size() == 2);
    CHECK(dips2[0].b < dips2[1].a);
    CHECK(dips2[0].a < -7.0);
    CHECK(dips2[0].b > -7.0);

    // |r| < 1/2 touching the boundary: shifted black soliton centered at -L
    std::vector<cplx> v(g.n_points);
    for (int j = 0; j < g.n_points; ++j) v[j] = std::tanh(g.x(j) + g.half_length);
    CHECK_THROWS_AS(find_dip_intervals(GridField(g, v, 0.0)), UnboundedDipError);
}

TEST_CASE("nonvanishing reference: unimodular, matches r/|r| off dips, winding") {
    Grid g(40.0, 2048);
    GridField one = sample(Profile::constant_one(), g);
    auto pr1 = nonvanishing_reference(one, 4.0);
    for (const auto& z : pr1.q_tilde.v) CHECK(std::abs(z - 1.0) < 1e-12);

    for (double c : {0.0, 0.3, 0.5, -0.5}) {
        GridField q = sample(Profile::soliton(c), g);
        auto pr = nonvanishing_reference(q, 4.0);
        for (const auto& z : pr.q_tilde.v) CHECK(std::abs(std::abs(z) - 1.0) < 1e-10);
        // off the dip intervals q_tilde = r/|r|
        for (int j = 0; j < g.n_points; j += 17) {
            bool inside = false;
            for (const auto& I : pr.intervals) inside = inside || (j >= I.ia && j <= I.ib);
            if (inside || std::abs(pr.r.v[j]) < 0.5) continue;
            cplx want = pr.r.v[j] / std::abs(pr.r.v[j]);
            CHECK(std::abs(pr.q_tilde.v[j] - want) < 1e-12);
        }
        // winding consistent with Theta(q_c) = 2 arccos(c)
        ModValue th = winding_theta(pr.q_tilde);
        CHECK(circ_dist(th.value, 2.0 * std::acos(c)) < 1e-6);
    }
}

TEST_CASE("winding of q_tilde is an integer plus twist/2pi") {
    Grid g(40.0, 2048);
    for (double c : {0.0, 0.4, -0.7}) {
        GridField q = sample(Profile::soliton(c), g);
        auto pr = nonvanishing_reference(q, 4.0);
        // total continuous phase increase without the boundary hop
        double interior = 0.0;
        for (int j = 0; j + 1 < g.n_points; ++j)
            interior += std::arg(pr.q_tilde.v[j + 1] / pr.q_tilde.v[j]);
        double frac = (interior - q.twist) / two_pi; // interior phase change = twist mod 2pi
        CHECK(std::abs(frac - std::round(frac)) < 1e-8);
    }
}

TEST_CASE("reference construction is stable under small perturbations") {
    Grid g(40.0, 1024);
    GridField q = sample(Profile::soliton(0.5), g);
    auto base = nonvanishing_reference(q, 4.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double max_ratio = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        double delta = 1e-3;
        std::vector<cplx> v = q.v;
        for (int j = 0; j < g.n_points; ++j) {
            double x = g.x(j);
            v[j] += delta * cplx(u(rng), u(rng)) * std::exp(-x * x / 9.0);
        }
        GridField qp(g, v, q.twist);
        auto pert = nonvanishing_reference(qp, 4.0);
        std::vector<cplx> dq(g.n_points), dref(g.n_points);
        for (int j = 0; j < g.n_points; ++j) {
            dq[j] = qp.v[j] - q.v[j];
            dref[j] = (qp.v[j] - pert.q_tilde.v[j]) - (q.v[j] - base.q_tilde.v[j]);
        }
        max_ratio = std::max(max_ratio, l2_norm(dref, g) / l2_norm(dq, g));
    }
    CHECK(max_ratio < 10.0); // measured Lipschitz ratio stays bounded
}

TEST_CASE("regularity bounds: trivial, single mode identity, soliton family") {
    Grid g(40.0, 2048);
    GridField one = sample(Profile::constant_one(), g);
    auto rep1 = verify_regularity_bounds(one, 4.0, 2.0);
    CHECK(rep1.pass);

    // single mode: the first line becomes a multiplier identity
    std::vector<cplx> v(g.n_points);
    double xi1 = 4.0 * pi / g.half_length;
    for (int j = 0; j < g.n_points; ++j)
        v[j] = 1.0 + 0.01 * std::exp(cplx(0.0, xi1 * g.x(j)));
    GridField mode(g, v, 0.0);
    auto repm = verify_regularity_bounds(mode, 4.0, 2.0);
    // ||q-r|| + ||r'||/tau vs ||q'||_W: both reduce to explicit multipliers
    double tau = 4.0;
    double m_qr = (xi1 * xi1) / (xi1 * xi1 + tau * tau);
    double m_rp = xi1 * tau / (xi1 * xi1 + tau * tau);
    double m_w = xi1 / std::sqrt(xi1 * xi1 + tau * tau);
    double want = (m_qr + m_rp) / m_w;
    CHECK(repm.interp_high.ratio == doctest::Approx(want).epsilon(2e-2));

    double worst = 0.0;
    for (double c : {0.0, 0.5, 0.9})
        for (double t : {2.0, 4.0, 8.0}) {
            GridField q = sample(Profile::soliton(c), g);
            auto rep = verify_regularity_bounds(q, t, 2.0);
            CHECK(rep.pass);
            worst = std::max({worst, rep.interp_low.ratio, rep.interp_high.ratio, rep.sup.ratio,
                              rep.quad.ratio});
        }
    CHECK(worst <= 4.0); // the frozen family constant
}
