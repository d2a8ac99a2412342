#include "gpx/profiles.hpp"

#include <cmath>
#include <sstream>

#include "gpx/errors.hpp"
#include "json.hpp"

namespace gpx {

namespace {

cplx soliton_value(double c, double x) {
    const double k = std::sqrt(1.0 - c * c);
    return cplx(k * std::tanh(k * x), c);
}

double soliton_twist(double c) { return -2.0 * std::acos(c); }

// phase ramp 0 -> phi0 over [-L/2, L/2]
double ramp_phase(double phi0, double x, double L) {
    return phi0 * smoothstep5((x + 0.5 * L) / L);
}

void check_residual(double residual) {
    if (residual > 1e-10) {
        std::ostringstream os;
        os.precision(3);
        os << std::scientific << residual;
        throw TruncationError("sample: boundary residual " + os.str() +
                              " exceeds 1e-10; enlarge the grid");
    }
}

} // namespace

Profile Profile::constant_one() { return Profile{}; }

Profile Profile::soliton(double c) {
    if (!(c >= -1.0 && c <= 1.0)) throw InvalidInputError("soliton: c must be in [-1, 1]");
    Profile p;
    p.kind = Kind::soliton;
    p.c = c;
    return p;
}

Profile Profile::perturbed_background(cplx beta, double width, double phase_ramp) {
    if (!(width > 0.0)) throw InvalidInputError("perturbed_background: width must be positive");
    Profile p;
    p.kind = Kind::perturbed_background;
    p.beta = beta;
    p.width = width;
    p.phase_ramp = phase_ramp;
    return p;
}

Profile Profile::soliton_plus_bump(double c, cplx beta, double width) {
    if (!(c >= -1.0 && c <= 1.0)) throw InvalidInputError("soliton_plus_bump: c must be in [-1, 1]");
    if (!(width > 0.0)) throw InvalidInputError("soliton_plus_bump: width must be positive");
    Profile p;
    p.kind = Kind::soliton_plus_bump;
    p.c = c;
    p.beta = beta;
    p.width = width;
    return p;
}

GridField sample(const Profile& p, const Grid& g, double t) {
    const int n = g.n_points;
    const double L = g.half_length;
    std::vector<cplx> v(n);
    switch (p.kind) {
    case Profile::Kind::constant_one: {
        for (int j = 0; j < n; ++j) v[j] = 1.0;
        return GridField(g, std::move(v), 0.0);
    }
    case Profile::Kind::soliton: {
        const double x0 = 2.0 * p.c * t;
        for (int j = 0; j < n; ++j) v[j] = soliton_value(p.c, g.x(j) - x0);
        const double k = std::sqrt(1.0 - p.c * p.c);
        double res = std::max(std::abs(soliton_value(p.c, -L - x0) - cplx(-k, p.c)),
                              std::abs(soliton_value(p.c, L - x0) - cplx(k, p.c)));
        check_residual(res);
        return GridField(g, std::move(v), soliton_twist(p.c));
    }
    case Profile::Kind::perturbed_background: {
        for (int j = 0; j < n; ++j) {
            double x = g.x(j);
            double b = std::exp(-(x / p.width) * (x / p.width));
            v[j] = (1.0 + p.beta * b) * std::polar(1.0, ramp_phase(p.phase_ramp, x, L));
        }
        double res = std::abs(p.beta) * std::exp(-(L / p.width) * (L / p.width));
        check_residual(res);
        return GridField(g, std::move(v), p.phase_ramp);
    }
    case Profile::Kind::soliton_plus_bump: {
        const double x0 = 2.0 * p.c * t;
        for (int j = 0; j < n; ++j) {
            double x = g.x(j);
            double b = std::exp(-(x / p.width) * (x / p.width));
            v[j] = soliton_value(p.c, x - x0) * (1.0 + p.beta * b);
        }
        const double k = std::sqrt(1.0 - p.c * p.c);
        double res = std::max(std::abs(soliton_value(p.c, -L - x0) - cplx(-k, p.c)),
                              std::abs(soliton_value(p.c, L - x0) - cplx(k, p.c))) +
                     std::abs(p.beta) * std::exp(-(L / p.width) * (L / p.width));
        check_residual(res);
        return GridField(g, std::move(v), soliton_twist(p.c));
    }
    }
    throw InvalidInputError("sample: unknown profile kind");
}

ExactInvariants exact_invariants(const Profile& p) {
    ExactInvariants inv;
    switch (p.kind) {
    case Profile::Kind::constant_one:
        return inv;
    case Profile::Kind::soliton: {
        const double k = std::sqrt(1.0 - p.c * p.c);
        // M = int(|q_c|^2 - 1) = -(1-c^2) int sech^2(kx) dx = -2k.
        inv.mass = -2.0 * k;
        inv.momentum = 2.0 * p.c * k;
        inv.energy = (8.0 / 3.0) * k * k * k;
        inv.theta = mod_2pi(2.0 * std::acos(p.c));
        return inv;
    }
    default:
        throw InvalidInputError("exact_invariants: no closed form for perturbed kinds");
    }
}

Profile profile_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant_one") return Profile::constant_one();
    if (kind == "soliton") return Profile::soliton(j.at("c").get<double>());
    if (kind == "perturbed_background")
        return Profile::perturbed_background(
            cplx(j.at("beta_re").get<double>(), j.at("beta_im").get<double>()),
            j.at("width").get<double>(), j.at("phase_ramp").get<double>());
    if (kind == "soliton_plus_bump")
        return Profile::soliton_plus_bump(
            j.at("c").get<double>(),
            cplx(j.at("beta_re").get<double>(), j.at("beta_im").get<double>()),
            j.at("width").get<double>());
    throw InvalidInputError("profile_from_json: unknown kind '" + kind + "'");
}

std::string profile_to_json(const Profile& p) {
    nlohmann::json j;
    switch (p.kind) {
    case Profile::Kind::constant_one: j["kind"] = "constant_one"; break;
    case Profile::Kind::soliton:
        j["kind"] = "soliton";
        j["c"] = p.c;
        break;
    case Profile::Kind::perturbed_background:
        j["kind"] = "perturbed_background";
        j["beta_re"] = p.beta.real();
        j["beta_im"] = p.beta.imag();
        j["width"] = p.width;
        j["phase_ramp"] = p.phase_ramp;
        break;
    case Profile::Kind::soliton_plus_bump:
        j["kind"] = "soliton_plus_bump";
        j["c"] = p.c;
        j["beta_re"] = p.beta.real();
        j["beta_im"] = p.beta.imag();
        j["width"] = p.width;
        break;
    }
    return j.dump();
}

GridField composite_soliton(const Grid& g, double c1, double x1, double c2, double x2) {
    std::vector<cplx> v(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
        double x = g.x(j);
        v[j] = soliton_value(c1, x - x1) * soliton_value(c2, x - x2);
    }
    double twist = soliton_twist(c1) + soliton_twist(c2);
    return GridField(g, std::move(v), twist);
}

} // namespace gpx
