#include "gpx/conserved.hpp"

#include <cmath>

#include "gpx/errors.hpp"
#include "json.hpp"

namespace gpx {

double mass(const GridField& q) {
    std::vector<double> t(q.v.size());
    for (std::size_t j = 0; j < q.v.size(); ++j) t[j] = std::norm(q.v[j]) - 1.0;
    return integrate(t, q.grid);
}

double momentum(const GridField& q) {
    GridField dq = spectral_derivative(q);
    std::vector<double> t(q.v.size());
    for (std::size_t j = 0; j < q.v.size(); ++j)
        t[j] = std::imag(q.v[j] * std::conj(dq.v[j]));
    return integrate(t, q.grid);
}

ModValue winding_theta(const GridField& qt) {
    const int n = qt.n();
    // phase increments must stay below pi per cell for an unambiguous winding
    double total = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
        double d = std::arg(qt.v[j + 1] / qt.v[j]);
        if (std::abs(d) > 0.9 * pi)
            throw InvalidInputError("winding_theta: phase step of " + std::to_string(d) +
                                    " per cell; grid too coarse for unambiguous winding");
        total += d;
    }
    // boundary step through q(L) = e^{i twist} q(-L)
    cplx qL = qt.v[0] * std::polar(1.0, qt.twist);
    total += std::arg(qL / qt.v[n - 1]);
    return reduce_mod_2pi(-total);
}

ModValue theta(const GridField& q, double tau) {
    return winding_theta(nonvanishing_reference(q, tau).q_tilde);
}

ModValue h1_with_reference(const GridField& q, const GridField& qt) {
    GridField dq = spectral_derivative(q);
    GridField dqt = spectral_derivative(qt);
    const int n = q.n();
    std::vector<double> t(n), defect(n);
    for (int j = 0; j < n; ++j) {
        cplx dqj = q.v[j] - qt.v[j];
        cplx term = std::conj(dqj) * dq.v[j] - std::conj(dqt.v[j]) * dqj;
        // third integrand of the H1 display; identically zero for |q_tilde|=1
        cplx third = (std::norm(qt.v[j]) - 1.0) * dqt.v[j] / qt.v[j];
        t[j] = -std::imag(term + third);
        defect[j] = std::abs(std::imag(third));
    }
    double raw = integrate(t, q.grid);
    if (integrate(defect, q.grid) > 1e-10)
        throw InvalidInputError("h1: reference field is not unimodular");
    return reduce_mod_2pi(raw);
}

ModValue h1(const GridField& q, double tau) {
    return h1_with_reference(q, nonvanishing_reference(q, tau).q_tilde);
}

double h3_diagnostic(const GridField& q) {
    GridField dq = spectral_derivative(q);
    GridField ddq = spectral_derivative(dq);
    const int n = q.n();
    std::vector<double> t(n);
    for (int j = 0; j < n; ++j) {
        cplx a = dq.v[j] * std::conj(ddq.v[j]);
        cplx b = 3.0 * (std::norm(q.v[j]) - 1.0) * q.v[j] * std::conj(dq.v[j]);
        t[j] = std::imag(a + b);
    }
    return integrate(t, q.grid) - momentum(q);
}

ConservedReport conserved_report(const GridField& q, double tau) {
    ConservedReport rep;
    rep.mass = mass(q);
    rep.momentum = momentum(q);
    auto ref = nonvanishing_reference(q, tau);
    rep.theta = winding_theta(ref.q_tilde);
    rep.h1 = h1_with_reference(q, ref.q_tilde);
    rep.notes.push_back("tau=" + std::to_string(tau));
    if (!ref.intervals.empty())
        rep.notes.push_back("dips=" + std::to_string(ref.intervals.size()));
    return rep;
}

std::string report_to_json(const ConservedReport& r) {
    nlohmann::json j;
    j["mass"] = r.mass;
    if (r.momentum) j["momentum"] = *r.momentum;
    j["theta"] = r.theta.value;
    j["theta_branch"] = r.theta.branch;
    j["h1"] = r.h1.value;
    j["h1_branch"] = r.h1.branch;
    j["notes"] = r.notes;
    return j.dump();
}

} // namespace gpx
