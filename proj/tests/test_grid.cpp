#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gpx/errors.hpp"
#include "gpx/grid.hpp"
#include "gpx/profiles.hpp"

using namespace gpx;

namespace {

GridField random_field(const Grid& g, unsigned seed, double amp = 0.2) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> a(-amp, amp), x0(-g.half_length / 3, g.half_length / 3),
        w(1.0, 3.0);
    std::vector<cplx> v(g.n_points, 1.0);
    for (int b = 0; b < 4; ++b) {
        cplx beta(a(rng), a(rng));
        double c = x0(rng), ww = w(rng);
        for (int j = 0; j < g.n_points; ++j) {
            double x = g.x(j);
            v[j] += beta * std::exp(-(x - c) * (x - c) / (ww * ww));
        }
    }
    return GridField(g, std::move(v), 0.0);
}

// O(N^2) direct summation oracle for the paper-convention transform
std::vector<cplx> dft_direct(const GridField& f) {
    const Grid& g = f.grid;
    std::vector<cplx> out(g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
        double xi = pi * (i - g.n_points / 2) / g.half_length;
        cplx acc = 0.0;
        for (int j = 0; j < g.n_points; ++j)
            acc += std::exp(cplx(0.0, -xi * g.x(j))) * f.v[j];
        out[i] = acc * g.dx() / std::sqrt(two_pi);
    }
    return out;
}

} // namespace

TEST_CASE("grid invariants") {
    Grid g(10.0, 64);
    CHECK(g.dx() * g.n_points == 2.0 * g.half_length); // exact: N is a power of two
    CHECK_THROWS_AS(Grid(10.0, 48), InvalidInputError);
    CHECK_THROWS_AS(Grid(10.0, 8), InvalidInputError);
    CHECK_THROWS_AS(Grid(-1.0, 64), InvalidInputError);
    std::vector<cplx> bad(64, 1.0);
    bad[3] = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(GridField(g, bad, 0.0), InvalidInputError);
}

TEST_CASE("dft: zero field, single mode against direct summation at N=32") {
    Grid g(10.0, 32);
    GridField zero(g, std::vector<cplx>(32, 0.0), 0.0);
    for (const auto& z : dft(zero)) CHECK(std::abs(z) == 0.0);

    std::vector<cplx> v(32);
    double xi1 = pi / g.half_length;
    for (int j = 0; j < 32; ++j) v[j] = std::exp(cplx(0.0, xi1 * g.x(j)));
    GridField f(g, v, 0.0);
    auto hat = dft(f);
    auto oracle = dft_direct(f);
    for (int i = 0; i < 32; ++i) CHECK(std::abs(hat[i] - oracle[i]) < 1e-12);
    // the k=1 bin carries 2L/sqrt(2 pi), frozen from the direct sum
    int k1 = 32 / 2 + 1;
    CHECK(std::abs(hat[k1] - 20.0 / std::sqrt(two_pi)) < 1e-10);
    for (int i = 0; i < 32; ++i)
        if (i != k1) CHECK(std::abs(hat[i]) < 1e-10);
}

TEST_CASE("dft: sech bump matches the analytic pair") {
    Grid g(40.0, 1024);
    std::vector<cplx> v(g.n_points);
    for (int j = 0; j < g.n_points; ++j) v[j] = 1.0 / std::cosh(g.x(j));
    GridField f(g, v, 0.0);
    auto hat = dft(f);
    auto freqs = dft_frequencies(g);
    for (int i = 0; i < g.n_points; ++i) {
        if (std::abs(freqs[i]) > 4.0) continue;
        double want = std::sqrt(pi / 2.0) / std::cosh(pi * freqs[i] / 2.0);
        CHECK(std::abs(hat[i] - want) < 1e-8);
    }
}

TEST_CASE("plancherel at 1e-12 relative") {
    Grid g(20.0, 256);
    GridField f = random_field(g, 7);
    auto hat = dft(f);
    double a = 0.0, b = 0.0;
    for (const auto& z : f.v) a += std::norm(z) * g.dx();
    for (const auto& z : hat) b += std::norm(z) * g.dxi();
    CHECK(std::abs(a - b) < 1e-12 * a);
}

TEST_CASE("twisted round trip reconstructs samples") {
    Grid g(20.0, 256);
    GridField q = sample(Profile::soliton(0.4), g);
    GridField back = retwisted(g, untwisted(q), q.twist);
    for (int j = 0; j < g.n_points; ++j) CHECK(std::abs(back.v[j] - q.v[j]) < 1e-12);
}

TEST_CASE("apply_fractional: identity, inverse pair, semigroup, single mode") {
    Grid g(20.0, 256);
    GridField f = random_field(g, 11);
    GridField id = apply_fractional(f, SobolevWeight(0.0, 3.0));
    for (int j = 0; j < g.n_points; ++j) CHECK(std::abs(id.v[j] - f.v[j]) < 1e-12);

    GridField down = apply_fractional(f, SobolevWeight(-2.0, 4.0));
    GridField up = apply_fractional(down, SobolevWeight(2.0, 4.0));
    for (int j = 0; j < g.n_points; ++j) CHECK(std::abs(up.v[j] - f.v[j]) < 1e-10);

    GridField s1 = apply_fractional(apply_fractional(f, SobolevWeight(0.7, 3.0)),
                                    SobolevWeight(-1.2, 3.0));
    GridField s2 = apply_fractional(f, SobolevWeight(-0.5, 3.0));
    double scale = linf_norm(f.v);
    for (int j = 0; j < g.n_points; ++j) CHECK(std::abs(s1.v[j] - s2.v[j]) < 1e-12 * scale);

    // single mode: s=-2, tau=2 scales by (xi_1^2+4)^{-1}
    std::vector<cplx> v(g.n_points);
    double xi1 = pi / g.half_length;
    for (int j = 0; j < g.n_points; ++j) v[j] = std::exp(cplx(0.0, xi1 * g.x(j)));
    GridField mode(g, v, 0.0);
    GridField scaled = apply_fractional(mode, SobolevWeight(-2.0, 2.0));
    double factor = 1.0 / (xi1 * xi1 + 4.0);
    for (int j = 0; j < g.n_points; ++j) CHECK(std::abs(scaled.v[j] - factor * mode.v[j]) < 1e-12);

    CHECK_THROWS_AS(SobolevWeight(0.0, 1.0), DomainError);
}

TEST_CASE("e_s_tau: constant background, soliton energy, tau monotonicity") {
    Grid g(40.0, 2048);
    GridField one = sample(Profile::constant_one(), g);
    CHECK(e_s_tau(one, 1.0, 2.0) < 1e-12);
    CHECK_THROWS_AS(e_s_tau(one, 1.0, 1.5), DomainError);

    for (double c : {0.0, 0.5}) {
        GridField q = sample(Profile::soliton(c), g);
        double e1 = e_s_tau(q, 1.0, 2.0);
        double want = 8.0 / 3.0 * std::pow(1.0 - c * c, 1.5);
        CHECK(e1 * e1 == doctest::Approx(want).epsilon(1e-9));
        // E^1_tau does not depend on tau
        CHECK(e_s_tau(q, 1.0, 6.0) == doctest::Approx(e1).epsilon(1e-12));
    }

    GridField q = sample(Profile::soliton(0.5), g);
    CHECK(e_s_tau(q, 0.0, 4.0) <= e_s_tau(q, 0.0, 2.0));
    for (double s : {0.0, 0.5, 1.0}) {
        double prev = 1e300;
        for (double tau : {2.0, 3.0, 4.0, 6.0, 8.0}) {
            double cur = e_s_tau(q, s, tau);
            CHECK(cur <= prev * (1.0 + 1e-12));
            prev = cur;
        }
    }
}

TEST_CASE("norm monotonicity and interpolation bound on random fields") {
    Grid g(20.0, 256);
    for (unsigned seed = 0; seed < 20; ++seed) {
        GridField f = random_field(g, 100 + seed);
        double prev = 1e300;
        for (double tau : {2.0, 3.0, 4.0, 6.0, 8.0}) {
            double cur = e_s_tau(f, 0.7, tau);
            CHECK(cur <= prev * (1.0 + 1e-12));
            prev = cur;
        }
        // ||f||_{H^s_tau} <= tau^{s-sigma} ||f||_{H^sigma_tau} for s <= sigma
        double tau = 3.0, s = -0.5, sigma = 1.0;
        double lhs = h_norm_tau(f.v, g, s, tau);
        double rhs = std::pow(tau, s - sigma) * h_norm_tau(f.v, g, sigma, tau);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("w_minus1_p_norm: zero, spike mass, p=2 frequency equivalence") {
    Grid g(20.0, 1024);
    GridField zero(g, std::vector<cplx>(g.n_points, 0.0), 0.0);
    CHECK(w_minus1_p_norm(zero, 3.0, 2.0) == 0.0);
    CHECK_THROWS_AS(w_minus1_p_norm(zero, 3.0, 1.0), DomainError);
    CHECK_THROWS_AS(w_minus1_p_norm(zero, 1.0, 2.0), DomainError);

    // discrete delta of mass m: ||j_tau * f||_p ~ m (p tau)^{-1/p}
    for (double p : {1.5, 2.0, 3.0}) {
        double tau = 2.0, m = 0.7;
        std::vector<cplx> v(g.n_points, 0.0);
        v[g.n_points / 2] = m / g.dx();
        GridField spike(g, v, 0.0);
        double got = w_minus1_p_norm(spike, tau, p);
        double want = m * std::pow(p * tau, -1.0 / p);
        CHECK(got == doctest::Approx(want).epsilon(0.05));
    }

    // p=2: equivalence constant against ||D_tau^{-1} f||_{L^2} is 1 and stable
    for (unsigned seed = 0; seed < 10; ++seed) {
        GridField f = random_field(g, 300 + seed);
        std::vector<cplx> d = density_defect(f);
        GridField fd(g, d, 0.0);
        double a = w_minus1_p_norm(fd, 3.0, 2.0);
        double b = h_norm_tau(d, g, -1.0, 3.0);
        CHECK(a / b == doctest::Approx(1.0).epsilon(2e-3));
    }
}

TEST_CASE("metric d^s: identity, phase identification, black soliton vs brute force") {
    Grid g(20.0, 256);
    GridField q = sample(Profile::soliton(0.3), g);
    CHECK(metric_d_s(q, q, 0.0) < 1e-10);

    GridField rot(g, q.v, q.twist);
    for (auto& z : rot.v) z *= std::polar(1.0, 0.77);
    // exact-arithmetic zero; the closed-form infimum cancels to the sqrt(eps) floor
    CHECK(metric_d_s(q, rot, 0.0) < 1e-6);
    CHECK(std::abs(metric_d_s(q, rot, 0.0) - metric_d_s(rot, q, 0.0)) < 1e-10);

    GridField one = sample(Profile::constant_one(), g);
    GridField black = sample(Profile::soliton(0.0), g);
    double d = metric_d_s(one, black, 0.0);
    CHECK(d > 0.0);

    // brute-force oracle: 720-point phase grid for the inner infimum
    const int n = g.n_points;
    std::vector<double> contrib(n);
    for (int jy = 0; jy < n; ++jy) {
        double y = g.x(jy);
        std::vector<cplx> a(n), b(n);
        for (int j = 0; j < n; ++j) {
            double w = 1.0 / std::cosh(g.x(j) - y);
            a[j] = w * one.v[j];
            b[j] = w * black.v[j];
        }
        double best = 1e300;
        for (int p = 0; p < 720; ++p) {
            cplx lam = std::polar(1.0, two_pi * p / 720.0);
            std::vector<cplx> diff(n);
            for (int j = 0; j < n; ++j) diff[j] = lam * a[j] - b[j];
            double val = std::pow(h_norm_tau(diff, g, 0.0, 2.0), 2);
            best = std::min(best, val);
        }
        contrib[jy] = best * g.dx();
    }
    double oracle = std::sqrt(pairwise_sum(std::span<const double>(contrib)));
    CHECK(d == doctest::Approx(oracle).epsilon(1e-4));

    Grid g2(20.0, 128);
    GridField other(g2, std::vector<cplx>(128, 1.0), 0.0);
    CHECK_THROWS_AS(metric_d_s(q, other, 0.0), InvalidInputError);
}

TEST_CASE("metric d^s triangle inequality on random triples") {
    Grid g(10.0, 128);
    for (unsigned seed = 0; seed < 5; ++seed) {
        GridField a = random_field(g, 500 + 3 * seed);
        GridField b = random_field(g, 501 + 3 * seed);
        GridField c = random_field(g, 502 + 3 * seed);
        double ab = metric_d_s(a, b, 0.5);
        double ac = metric_d_s(a, c, 0.5);
        double cb = metric_d_s(c, b, 0.5);
        CHECK(ab <= ac + cb + 1e-9);
    }
}

TEST_CASE("field dump round trip") {
    Grid g(20.0, 64);
    GridField q = sample(Profile::soliton(0.2), g);
    write_field(q, "field_dump_test");
    GridField back = read_field("field_dump_test");
    CHECK(back.twist == doctest::Approx(q.twist));
    for (int j = 0; j < g.n_points; ++j) CHECK(std::abs(back.v[j] - q.v[j]) < 1e-14);
}

TEST_CASE("spectral derivative of a twisted field matches the closed form") {
    Grid g(30.0, 1024);
    GridField q = sample(Profile::soliton(0.6), g);
    GridField dq = spectral_derivative(q);
    double k = std::sqrt(1.0 - 0.36);
    for (int j = 0; j < g.n_points; j += 37) {
        double x = g.x(j);
        double want = k * k / std::pow(std::cosh(k * x), 2);
        CHECK(std::abs(dq.v[j] - want) < 1e-9);
    }
}
