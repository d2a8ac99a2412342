#include "gpx/evolve.hpp"

#include <cmath>
#include <sstream>

#include "gpx/energies.hpp"
#include "gpx/errors.hpp"
#include "gpx/fft.hpp"
#include "gpx/scattering.hpp"

namespace gpx {

namespace {

struct Stepper {
    Grid grid;
    double twist;
    double dt;
    std::vector<cplx> linear_mult;

    Stepper(const Grid& g, double twist_, double dt_) : grid(g), twist(twist_), dt(dt_) {
        // the untwisted field sees the shifted symbol (xi + twist/(2L))^2
        const double slope = twist / (2.0 * g.half_length);
        linear_mult.resize(g.n_points);
        for (int k = 0; k < g.n_points; ++k) {
            double xi = g.xi(k) + slope;
            linear_mult[k] = std::polar(1.0, -xi * xi * dt);
        }
    }

    void half_nonlinear(std::vector<cplx>& v) const {
        for (auto& z : v) z *= std::polar(1.0, -dt * (std::norm(z) - 1.0));
    }

    void apply(std::vector<cplx>& v) const {
        half_nonlinear(v);
        // linear step on the untwisted field
        const double slope = twist / (2.0 * grid.half_length);
        for (int j = 0; j < grid.n_points; ++j) v[j] *= std::polar(1.0, -slope * grid.x(j));
        fft(v);
        for (int k = 0; k < grid.n_points; ++k) v[k] *= linear_mult[k];
        ifft(v);
        for (int j = 0; j < grid.n_points; ++j) v[j] *= std::polar(1.0, slope * grid.x(j));
        half_nonlinear(v);
    }
};

double boundary_energy(const GridField& q) {
    const Grid& g = q.grid;
    GridField dq = spectral_derivative(q);
    double acc = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        if (std::abs(g.x(j)) < 0.9 * g.half_length) continue;
        acc += (std::norm(dq.v[j]) + std::pow(std::norm(q.v[j]) - 1.0, 2)) * g.dx();
    }
    return acc;
}

} // namespace

GridField step(const GridField& q, double dt) {
    Stepper st(q.grid, q.twist, dt);
    std::vector<cplx> v = q.v;
    st.apply(v);
    return GridField(q.grid, std::move(v), q.twist);
}

TrajectoryReport run(const GridField& q0, const EvolveConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw InvalidInputError("run: dt must be positive");
    const double dx = q0.grid.dx();
    if (cfg.dt > cfg.safety * dx * dx)
        throw InvalidInputError("run: dt exceeds safety * dx^2; raise safety explicitly if the "
                                "splitting error budget allows it");
    const long n_steps = std::lround(cfg.t_final / cfg.dt);
    Stepper st(q0.grid, q0.twist, cfg.dt);
    const double boundary_floor = boundary_energy(q0);

    TrajectoryReport rep;
    std::vector<cplx> v = q0.v;

    auto record = [&](double t) {
        GridField q(q0.grid, v, q0.twist);
        TrajectorySample s;
        s.t = t;
        s.mass = mass(q);
        double e1 = e_s_tau(q, 1.0, 2.0);
        s.energy = e1 * e1;
        if (cfg.track_conserved) {
            auto ref = nonvanishing_reference(q, cfg.conserved_tau);
            s.theta = winding_theta(ref.q_tilde);
            s.h1 = h1_with_reference(q, ref.q_tilde);
            s.e0_tau = conserved_e0(q, cfg.e0_tau);
            for (const auto& lam : cfg.probe_lambdas)
                s.tc.push_back(renormalized_transmission(q, lam).tc_inv);
        }
        s.boundary_flag = boundary_energy(q) > 100.0 * (boundary_floor + 1e-14);
        rep.boundary_flagged = rep.boundary_flagged || s.boundary_flag;
        rep.rows.push_back(std::move(s));
    };

    record(0.0);
    for (long k = 1; k <= n_steps; ++k) {
        st.apply(v);
        for (const auto& z : v)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw BlowUpError("run: non-finite sample at step " + std::to_string(k));
        if (k % cfg.report_every == 0 || k == n_steps) record(k * cfg.dt);
    }
    rep.final_state = GridField(q0.grid, std::move(v), q0.twist);
    return rep;
}

std::string TrajectoryReport::csv() const {
    std::ostringstream os;
    os.precision(16);
    os << "t,mass,energy,theta,theta_branch,h1,h1_branch,e0_tau";
    std::size_t np = rows.empty() ? 0 : rows.front().tc.size();
    for (std::size_t p = 0; p < np; ++p) os << ",re_tc_l" << p + 1 << ",im_tc_l" << p + 1;
    os << '\n';
    for (const auto& s : rows) {
        os << s.t << ',' << s.mass << ',' << s.energy << ',' << s.theta.value << ','
           << s.theta.branch << ',' << s.h1.value << ',' << s.h1.branch << ',' << s.e0_tau;
        for (const auto& z : s.tc) os << ',' << z.real() << ',' << z.imag();
        os << '\n';
    }
    return os.str();
}

} // namespace gpx
