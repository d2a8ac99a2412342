#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gpx/conserved.hpp"
#include "gpx/errors.hpp"
#include "gpx/profiles.hpp"

using namespace gpx;

TEST_CASE("constant_one and soliton sampling") {
    Grid g(40.0, 1024);
    GridField one = sample(Profile::constant_one(), g);
    CHECK(one.twist == 0.0);
    for (const auto& z : one.v) CHECK(z == cplx(1.0, 0.0));

    GridField black = sample(Profile::soliton(0.0), g, 0.0);
    // q(x) = tanh(x): q(0) = 0, endpoints near +-1
    CHECK(std::abs(black.v[g.n_points / 2]) < 1e-13);
    CHECK(std::abs(black.v[0] - cplx(-1.0, 0.0)) < 1e-10);
    CHECK(black.twist == doctest::Approx(-pi));

    // soliton(0.5) at t=1 recentered at x=1 with |q|^2 dip = c^2
    GridField q = sample(Profile::soliton(0.5), g, 1.0);
    int j1 = -1;
    double best = 1e300;
    for (int j = 0; j < g.n_points; ++j)
        if (std::norm(q.v[j]) < best) {
            best = std::norm(q.v[j]);
            j1 = j;
        }
    CHECK(std::abs(g.x(j1) - 1.0) <= g.dx());
    CHECK(best == doctest::Approx(0.25).epsilon(1e-3)); // grid-node offset from x = 1
}

TEST_CASE("exact invariants") {
    auto inv0 = exact_invariants(Profile::soliton(0.0));
    CHECK(inv0.mass == doctest::Approx(-2.0));
    CHECK(inv0.momentum == 0.0);
    CHECK(inv0.energy == doctest::Approx(8.0 / 3.0));
    CHECK(inv0.theta == doctest::Approx(pi));
    CHECK(!inv0.eigenvalue_hint.has_value());

    auto inv1 = exact_invariants(Profile::soliton(1.0));
    CHECK(inv1.mass == doctest::Approx(0.0));
    CHECK(inv1.momentum == doctest::Approx(0.0));
    CHECK(inv1.energy == doctest::Approx(0.0));
    CHECK(inv1.theta == doctest::Approx(0.0));

    auto invh = exact_invariants(Profile::soliton(0.5));
    CHECK(invh.momentum == doctest::Approx(std::sqrt(0.75)));
    CHECK(invh.energy == doctest::Approx(8.0 / 3.0 * std::pow(0.75, 1.5)));

    CHECK_THROWS_AS(exact_invariants(Profile::perturbed_background(0.1, 1.0, 0.0)),
                    InvalidInputError);
}

TEST_CASE("discrete functionals match closed forms at L=40, N=4096") {
    Grid g(40.0, 4096);
    for (double c : {0.0, 0.3, -0.3, 0.5, -0.5, 0.9, -0.9}) {
        GridField q = sample(Profile::soliton(c), g);
        auto ex = exact_invariants(Profile::soliton(c));
        CHECK(std::abs(mass(q) - ex.mass) < 1e-8);
        CHECK(std::abs(momentum(q) - ex.momentum) < 1e-8);
        double e1 = e_s_tau(q, 1.0, 2.0);
        CHECK(std::abs(e1 * e1 - ex.energy) < 1e-8);
    }
}

TEST_CASE("translation covariance under grid-multiple shifts") {
    Grid g(40.0, 2048);
    const double c = 0.5;
    // 2 c t a grid multiple: t = 16 dx / (2c)
    const int shift = 16;
    const double t = shift * g.dx() / (2.0 * c);
    GridField a = sample(Profile::soliton(c), g, t);
    GridField b = sample(Profile::soliton(c), g, 0.0);
    // twisted circular shift of b by `shift` cells
    double err = 0.0;
    for (int j = 0; j < g.n_points; ++j)
        err = std::max(err, std::abs(a.v[j] - b.at_wrapped(j - shift)));
    CHECK(err < 1e-9);
}

TEST_CASE("boundary residual enforcement") {
    Grid tiny(2.0, 64); // tanh(2) is nowhere near 1
    CHECK_THROWS_AS(sample(Profile::soliton(0.0), tiny), TruncationError);
    Grid ok(40.0, 64);
    CHECK_NOTHROW(sample(Profile::soliton(0.0), ok));
    // wide bump relative to the box
    CHECK_THROWS_AS(sample(Profile::perturbed_background(0.5, 30.0, 0.0), ok), TruncationError);
}

TEST_CASE("profile json round trip") {
    Profile p = Profile::perturbed_background(cplx(0.1, -0.2), 2.5, 0.7);
    Profile q = profile_from_json(profile_to_json(p));
    CHECK(q.kind == p.kind);
    CHECK(q.beta == p.beta);
    CHECK(q.width == p.width);
    CHECK(q.phase_ramp == p.phase_ramp);
    Profile s = profile_from_json("{\"kind\":\"soliton\",\"c\":0.5}");
    CHECK(s.c == 0.5);
    CHECK_THROWS_AS(profile_from_json("{\"kind\":\"mystery\"}"), InvalidInputError);
}

TEST_CASE("composite soliton asymptotes and twist") {
    Grid g(40.0, 2048);
    GridField q = composite_soliton(g, 0.3, -10.0, 0.6, 10.0);
    CHECK(std::abs(std::abs(q.v[0]) - 1.0) < 1e-10);
    CHECK(q.twist == doctest::Approx(-2.0 * (std::acos(0.3) + std::acos(0.6))));
}
