#include "gpx/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gpx/errors.hpp"
#include "gpx/fft.hpp"
#include "json.hpp"

namespace gpx {

namespace {
bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }
} // namespace

Grid::Grid(double L, int N) : half_length(L), n_points(N) {
    if (!(L > 0.0)) throw InvalidInputError("Grid: half_length must be positive");
    if (!is_pow2(N) || N < 16) throw InvalidInputError("Grid: N must be a power of two >= 16");
}

GridField::GridField(Grid g, std::vector<cplx> samples, double theta_twist)
    : grid(g), v(std::move(samples)), twist(theta_twist) {
    if (static_cast<int>(v.size()) != grid.n_points)
        throw InvalidInputError("GridField: sample count does not match grid");
    for (const auto& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw InvalidInputError("GridField: non-finite sample");
    if (!std::isfinite(twist)) throw InvalidInputError("GridField: non-finite twist");
}

cplx GridField::at_wrapped(int j) const {
    const int n = grid.n_points;
    long w = 0;
    while (j >= n) { j -= n; ++w; }
    while (j < 0) { j += n; --w; }
    return v[j] * std::polar(1.0, twist * static_cast<double>(w));
}

SobolevWeight::SobolevWeight(double s_, double tau_) : s(s_), tau(tau_) {
    if (!(tau >= 2.0)) throw DomainError("SobolevWeight: tau must be >= 2");
}

double ramp_slope(const GridField& f) { return f.twist / (2.0 * f.grid.half_length); }

std::vector<cplx> untwisted(const GridField& f) {
    std::vector<cplx> out(f.v.size());
    const double slope = ramp_slope(f);
    for (int j = 0; j < f.n(); ++j) out[j] = f.v[j] * std::polar(1.0, -slope * f.grid.x(j));
    return out;
}

GridField retwisted(const Grid& g, std::vector<cplx> u, double twist) {
    const double slope = twist / (2.0 * g.half_length);
    for (int j = 0; j < g.n_points; ++j) u[j] *= std::polar(1.0, slope * g.x(j));
    return GridField(g, std::move(u), twist);
}

GridField spectral_derivative(const GridField& f) {
    std::vector<cplx> u = untwisted(f);
    fft(u);
    const Grid& g = f.grid;
    for (int k = 0; k < g.n_points; ++k) u[k] *= cplx(0.0, g.xi(k));
    ifft(u);
    // q' = e^{i rho x}(u' + i rho' u) with rho' the constant ramp slope
    const double slope = ramp_slope(f);
    std::vector<cplx> ut = untwisted(f);
    for (int j = 0; j < g.n_points; ++j) u[j] += cplx(0.0, slope) * ut[j];
    return retwisted(g, std::move(u), f.twist);
}

GridField upsample_field(const GridField& f, int factor) {
    if (factor <= 1) return f;
    std::vector<cplx> fine = upsample(untwisted(f), factor);
    Grid gf(f.grid.half_length, f.grid.n_points * factor);
    return retwisted(gf, std::move(fine), f.twist);
}

std::vector<cplx> dft(const GridField& f) {
    const Grid& g = f.grid;
    std::vector<cplx> a = f.v;
    fft(a);
    const int n = g.n_points;
    const double scale = g.dx() / std::sqrt(two_pi);
    std::vector<cplx> out(n);
    // signed order: position i corresponds to k = i - N/2; bin index is k mod N.
    for (int i = 0; i < n; ++i) {
        int k = i - n / 2;
        int bin = k >= 0 ? k : k + n;
        double sign = (k % 2 == 0) ? 1.0 : -1.0; // e^{i pi k} from x_j = -L + j dx
        out[i] = a[bin] * scale * sign;
    }
    return out;
}

std::vector<double> dft_frequencies(const Grid& g) {
    std::vector<double> out(g.n_points);
    for (int i = 0; i < g.n_points; ++i)
        out[i] = pi * (i - g.n_points / 2) / g.half_length;
    return out;
}

GridField apply_fractional(const GridField& f, const SobolevWeight& w) {
    std::vector<cplx> u = untwisted(f);
    fft(u);
    const Grid& g = f.grid;
    for (int k = 0; k < g.n_points; ++k) {
        double xi = g.xi(k);
        u[k] *= std::pow(xi * xi + w.tau * w.tau, 0.5 * w.s);
    }
    ifft(u);
    return retwisted(g, std::move(u), f.twist);
}

double h_norm_tau(const std::vector<cplx>& samples, const Grid& g, double s, double tau) {
    std::vector<cplx> a = samples;
    fft(a);
    const int n = g.n_points;
    // |hat f|^2 dxi with the 1/sqrt(2pi) convention: |a_k dx / sqrt(2pi)|^2 * (pi/L)
    const double w = g.dx() * g.dx() / two_pi * g.dxi();
    std::vector<double> terms(n);
    for (int k = 0; k < n; ++k) {
        double xi = g.xi(k);
        terms[k] = std::norm(a[k]) * std::pow(xi * xi + tau * tau, s) * w;
    }
    return std::sqrt(pairwise_sum(terms));
}

double e_s_tau(const GridField& q, double s, double tau) {
    if (!(tau >= 2.0)) throw DomainError("e_s_tau: tau must be >= 2");
    std::vector<cplx> m = density_defect(q);
    GridField dq = spectral_derivative(q);
    double a = h_norm_tau(m, q.grid, s - 1.0, tau);
    double b = h_norm_tau(dq.v, q.grid, s - 1.0, tau);
    return std::sqrt(a * a + b * b);
}

double w_minus1_p_norm(const GridField& f, double tau, double p) {
    if (!(tau >= 2.0)) throw DomainError("w_minus1_p_norm: tau must be >= 2");
    if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("w_minus1_p_norm: p must be in (1,inf)");
    // G(x) = int_{y>x} e^{-tau(y-x)} f(y) dy, backward sweep with a per-cell
    // exact integral of the linear interpolant under the exponential kernel.
    const Grid& g = f.grid;
    const int n = g.n_points;
    const double h = g.dx();
    const double r = std::exp(-tau * h);
    // int_0^h e^{-tau s}[a + (b-a)s/h] ds  with a = f(x), b = f(x+h)
    const double i0 = (1.0 - r) / tau;                    // weight of a
    const double i1 = (i0 - h * r) / (tau * h);           // weight of (b-a)
    std::vector<cplx> G(n, cplx(0.0, 0.0));
    for (int j = n - 2; j >= 0; --j) {
        cplx a = f.v[j], b = f.v[j + 1];
        G[j] = r * G[j + 1] + a * (i0 - i1) + b * i1;
    }
    std::vector<double> terms(n);
    for (int j = 0; j < n; ++j) terms[j] = std::pow(std::abs(G[j]), p) * h;
    return std::pow(pairwise_sum(terms), 1.0 / p);
}

double metric_d_s(const GridField& p, const GridField& q, double s) {
    if (!(p.grid == q.grid)) throw InvalidInputError("metric_d_s: grid mismatch");
    if (s < 0.0) throw DomainError("metric_d_s: s must be >= 0");
    const Grid& g = p.grid;
    const int n = g.n_points;
    const double tau = 2.0; // d^s uses the paper's D = D_2 weight
    std::vector<double> contrib(n);
    for (int jy = 0; jy < n; ++jy) {
        const double y = g.x(jy);
        std::vector<cplx> a(n), b(n);
        for (int j = 0; j < n; ++j) {
            double w = 1.0 / std::cosh(g.x(j) - y);
            a[j] = w * p.v[j];
            b[j] = w * q.v[j];
        }
        fft(a);
        fft(b);
        const double wgt = g.dx() * g.dx() / two_pi * g.dxi();
        double na = 0, nb = 0;
        cplx ip(0.0, 0.0);
        for (int k = 0; k < n; ++k) {
            double m = std::pow(g.xi(k) * g.xi(k) + tau * tau, s) * wgt;
            na += std::norm(a[k]) * m;
            nb += std::norm(b[k]) * m;
            ip += a[k] * std::conj(b[k]) * m;
        }
        double val = na + nb - 2.0 * std::abs(ip);
        contrib[jy] = std::max(val, 0.0) * g.dx();
    }
    return std::sqrt(pairwise_sum(contrib));
}

double l2_norm(const std::vector<cplx>& samples, const Grid& g) {
    std::vector<double> t(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j) t[j] = std::norm(samples[j]) * g.dx();
    return std::sqrt(pairwise_sum(t));
}

double lp_norm(const std::vector<cplx>& samples, const Grid& g, double p) {
    std::vector<double> t(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j)
        t[j] = std::pow(std::abs(samples[j]), p) * g.dx();
    return std::pow(pairwise_sum(t), 1.0 / p);
}

double linf_norm(const std::vector<cplx>& samples) {
    double m = 0.0;
    for (const auto& z : samples) m = std::max(m, std::abs(z));
    return m;
}

double integrate(const std::vector<double>& samples, const Grid& g) {
    return pairwise_sum(samples) * g.dx();
}

cplx integrate(const std::vector<cplx>& samples, const Grid& g) {
    return pairwise_sum(samples) * g.dx();
}

std::vector<cplx> density_defect(const GridField& q) {
    std::vector<cplx> m(q.v.size());
    for (std::size_t j = 0; j < q.v.size(); ++j) m[j] = std::norm(q.v[j]) - 1.0;
    return m;
}

void write_field(const GridField& f, const std::string& basename) {
    std::ofstream csv(basename + ".csv");
    csv << "x,re_q,im_q\n";
    csv.precision(17);
    for (int j = 0; j < f.n(); ++j)
        csv << f.grid.x(j) << ',' << f.v[j].real() << ',' << f.v[j].imag() << '\n';
    nlohmann::json side;
    side["L"] = f.grid.half_length;
    side["N"] = f.grid.n_points;
    side["twist"] = f.twist;
    std::ofstream js(basename + ".json");
    js << side.dump(2) << '\n';
}

GridField read_field(const std::string& basename) {
    std::ifstream js(basename + ".json");
    if (!js) throw InvalidInputError("read_field: missing sidecar " + basename + ".json");
    nlohmann::json side;
    js >> side;
    Grid g(side.at("L").get<double>(), side.at("N").get<int>());
    std::ifstream csv(basename + ".csv");
    if (!csv) throw InvalidInputError("read_field: missing " + basename + ".csv");
    std::string line;
    std::getline(csv, line); // header
    std::vector<cplx> v;
    v.reserve(g.n_points);
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        auto c1 = line.find(',');
        auto c2 = line.find(',', c1 + 1);
        v.emplace_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)), std::stod(line.substr(c2 + 1)));
    }
    return GridField(g, std::move(v), side.at("twist").get<double>());
}

} // namespace gpx
