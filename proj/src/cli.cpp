#include "gpx/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gpx/checks.hpp"
#include "gpx/conserved.hpp"
#include "gpx/eigenvalues.hpp"
#include "gpx/energies.hpp"
#include "gpx/errors.hpp"
#include "gpx/evolve.hpp"
#include "gpx/profiles.hpp"
#include "gpx/scattering.hpp"

namespace gpx::cli {

namespace {

cplx parse_complex(std::string s) {
    // forms: "2", "2i", "0.5+0.3i", "-1.2-0.7i", "i", "-i"
    if (s.empty()) throw InvalidInputError("empty complex literal");
    auto parse_part = [](const std::string& t) -> double {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return std::stod(t);
    };
    if (s.back() == 'i') {
        std::string body = s.substr(0, s.size() - 1);
        // split at the last +/- that is not an exponent sign or leading
        for (std::size_t k = body.size(); k-- > 1;) {
            char c = body[k];
            if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E')
                return {std::stod(body.substr(0, k)), parse_part(body.substr(k))};
        }
        return {0.0, parse_part(body)};
    }
    return {std::stod(s), 0.0};
}

Grid parse_grid(const std::string& s) {
    // "L=40,N=4096"
    double L = 40.0;
    int N = 2048;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidInputError("grid: expected L=..,N=..");
        std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "L")
            L = std::stod(val);
        else if (key == "N")
            N = std::stoi(val);
        else
            throw InvalidInputError("grid: unknown key '" + key + "'");
    }
    return Grid(L, N);
}

Profile load_profile(const std::string& spec) {
    if (spec == "constant_one") return Profile::constant_one();
    if (!spec.empty() && spec.front() == '{') return profile_from_json(spec);
    std::ifstream in(spec);
    if (!in) throw InvalidInputError("profile: cannot open '" + spec + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return profile_from_json(ss.str());
}

std::string hash_of(const nlohmann::json& cfg) {
    std::ostringstream os;
    os << std::hex << fnv1a(cfg.dump());
    return os.str();
}

void emit(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream f(out_path);
        f << j.dump(2) << '\n';
    }
}

std::vector<CheckResult> run_suite(const std::string& suite, unsigned seed) {
    if (suite == "contour") return contour_suite();
    if (suite == "trivial") return trivial_suite();
    if (suite == "invariants") return soliton_invariants_suite();
    if (suite == "h1") return h1_suite(seed);
    if (suite == "schwarz") return schwarz_suite(seed);
    if (suite == "pipeline") return pipeline_suite();
    if (suite == "all") {
        std::vector<CheckResult> all;
        for (const char* s : {"contour", "trivial", "invariants", "h1", "schwarz", "pipeline"}) {
            auto part = run_suite(s, seed);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw InvalidInputError("verify: unknown suite '" + suite + "'");
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"gpx: spectral transforms and conserved quantities for the 1-D "
                 "Gross-Pitaevskii equation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string profile_spec = "constant_one";
    std::string grid_spec = "L=40,N=2048";
    std::string out_path;
    unsigned seed = 1234;
    app.add_option("--seed", seed, "seed for randomized families");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--profile", profile_spec, "profile JSON, file, or 'constant_one'");
        sub->add_option("--grid", grid_spec, "grid as L=..,N=..");
        sub->add_option("--out", out_path, "write the report here instead of stdout");
    };

    // invariants
    auto* inv = app.add_subcommand("invariants", "mass, momentum, theta, h1, E^s_tau table");
    double inv_tau = 4.0;
    std::vector<double> inv_s{0.0, 0.5, 1.0};
    add_common(inv);
    inv->add_option("--tau", inv_tau, "scale for theta/h1 and the norm table");
    inv->add_option("--s", inv_s, "s values for the E^s_tau table");

    // transmission
    auto* tr = app.add_subcommand("transmission", "T^-1 / Tc^-1 at lambda points");
    std::vector<std::string> tr_lambdas{"2i"};
    std::vector<double> tr_grid; // re0 re1 n_re im0 im1 n_im
    bool tr_direct = false;
    add_common(tr);
    tr->add_option("--lambda", tr_lambdas, "lambda values, e.g. 2i 0.5+0.3i");
    tr->add_option("--lambda-grid", tr_grid,
                   "rectangular sweep for contour plots: re0 re1 n_re im0 im1 n_im")
        ->expected(6);
    tr->add_flag("--direct", tr_direct, "also run the direct ODE solve");

    // energy
    auto* en = app.add_subcommand("energy", "conserved energy ladder");
    std::vector<double> en_s{0.5};
    double en_tau0 = 2.0;
    add_common(en);
    en->add_option("--s", en_s, "orders s in (0,2)");
    en->add_option("--tau0", en_tau0, "base scale tau0 >= 2");

    // evolve
    auto* ev = app.add_subcommand("evolve", "split-step GP trajectory with drift columns");
    double ev_dt = 1e-3, ev_T = 1.0, ev_safety = 2.0;
    int ev_every = 100;
    std::vector<std::string> ev_probes{"2i"};
    std::string ev_csv;
    add_common(ev);
    ev->add_option("--dt", ev_dt, "time step");
    ev->add_option("--t-final", ev_T, "final time");
    ev->add_option("--report-every", ev_every, "steps between report rows");
    ev->add_option("--probes", ev_probes, "Tc^-1 probe lambdas");
    ev->add_option("--safety", ev_safety, "dt <= safety dx^2 budget");
    ev->add_option("--csv", ev_csv, "trajectory CSV path");

    // eigs
    auto* ei = app.add_subcommand("eigs", "Lax eigenvalues and Tc^-1 zeros in (-1,1)");
    std::vector<double> ei_band{-0.9, 0.9};
    double ei_res = 1e-6;
    add_common(ei);
    ei->add_option("--band", ei_band, "search band inside (-1,1)")->expected(2);
    ei->add_option("--resolution", ei_res, "bisection resolution");

    // verify
    auto* ve = app.add_subcommand("verify", "run an identity/invariant suite");
    std::string ve_suite = "all";
    ve->add_option("--suite", ve_suite, "contour|trivial|invariants|h1|schwarz|pipeline|all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ve->parsed()) {
            auto results = run_suite(ve_suite, seed);
            int passed = 0;
            for (const auto& r : results) {
                std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << '\n';
                passed += r.pass;
            }
            std::cout << passed << "/" << results.size() << " checks passed\n";
            return all_pass(results) ? 0 : 1;
        }

        Grid grid = parse_grid(grid_spec);
        Profile profile = load_profile(profile_spec);
        GridField q = sample(profile, grid);
        nlohmann::json cfg;
        cfg["profile"] = profile_to_json(profile);
        cfg["grid"] = grid_spec;
        cfg["seed"] = seed;

        if (inv->parsed()) {
            cfg["tau"] = inv_tau;
            auto rep = conserved_report(q, inv_tau);
            nlohmann::json j = nlohmann::json::parse(report_to_json(rep));
            nlohmann::json table;
            for (double s : inv_s) table[std::to_string(s)] = e_s_tau(q, s, inv_tau);
            j["e_s_tau"] = table;
            j["config_hash"] = hash_of(cfg);
            emit(j, out_path);
            return 0;
        }
        if (tr->parsed()) {
            std::vector<cplx> lams;
            if (tr_grid.size() == 6) {
                cfg["lambda_grid"] = tr_grid;
                int n_re = static_cast<int>(tr_grid[2]), n_im = static_cast<int>(tr_grid[5]);
                for (int a = 0; a < n_re; ++a)
                    for (int b = 0; b < n_im; ++b) {
                        double re = tr_grid[0] +
                                    (n_re > 1 ? (tr_grid[1] - tr_grid[0]) * a / (n_re - 1) : 0.0);
                        double im = tr_grid[3] +
                                    (n_im > 1 ? (tr_grid[4] - tr_grid[3]) * b / (n_im - 1) : 0.0);
                        lams.emplace_back(re, im);
                    }
            } else {
                cfg["lambda"] = tr_lambdas;
                for (const auto& s : tr_lambdas) lams.push_back(parse_complex(s));
            }
            nlohmann::json arr = nlohmann::json::array();
            std::vector<nlohmann::json> slots(lams.size());
            parallel_for(static_cast<int>(lams.size()), [&](int i) {
                ScatteringOptions opts;
                opts.want_direct = tr_direct;
                auto res = renormalized_transmission(q, lams[i], opts);
                slots[i] = nlohmann::json::parse(scattering_to_json(res));
            });
            for (auto& s : slots) arr.push_back(std::move(s));
            nlohmann::json j;
            j["results"] = arr;
            j["config_hash"] = hash_of(cfg);
            emit(j, out_path);
            return 0;
        }
        if (en->parsed()) {
            cfg["s"] = en_s;
            cfg["tau0"] = en_tau0;
            double quad_tol = 0.0; // 0: accept the default node budget
            if (const char* env = std::getenv("GPX_QUAD_TOL")) quad_tol = std::atof(env);
            TcLadder ladder(q);
            nlohmann::json arr = nlohmann::json::array();
            for (double s : en_s) {
                nlohmann::json row;
                row["s"] = s;
                row["tau0"] = en_tau0;
                if (s == 0.0) {
                    row["value"] = conserved_e0(q, en_tau0);
                    row["quad_error"] = 0.0;
                    row["tail_fraction"] = 0.0;
                    row["nodes"] = 1;
                } else {
                    EnergyQuadratureConfig qc;
                    auto res = conserved_es(q, s, en_tau0, qc, &ladder);
                    for (int round = 0; quad_tol > 0.0 && round < 4 &&
                                        res.quad_error > quad_tol * std::abs(res.value);
                         ++round) {
                        qc.n_nodes *= 2;
                        res = conserved_es(q, s, en_tau0, qc, &ladder);
                    }
                    if (quad_tol > 0.0 && res.quad_error > quad_tol * std::abs(res.value))
                        throw ToleranceError("energy: quadrature tolerance not reached");
                    row["value"] = res.value;
                    row["quad_error"] = res.quad_error;
                    row["tail_fraction"] = res.tail_fraction;
                    row["nodes"] = res.nodes;
                }
                arr.push_back(row);
            }
            nlohmann::json j;
            j["ladder"] = arr;
            j["config_hash"] = hash_of(cfg);
            emit(j, out_path);
            return 0;
        }
        if (ev->parsed()) {
            cfg["dt"] = ev_dt;
            cfg["t_final"] = ev_T;
            EvolveConfig ec;
            ec.dt = ev_dt;
            ec.t_final = ev_T;
            ec.report_every = ev_every;
            ec.safety = ev_safety;
            for (const auto& s : ev_probes) ec.probe_lambdas.push_back(parse_complex(s));
            auto rep = gpx::run(q, ec);
            if (!ev_csv.empty()) {
                std::ofstream f(ev_csv);
                f << rep.csv();
            } else {
                std::cout << rep.csv();
            }
            nlohmann::json j;
            j["rows"] = rep.rows.size();
            j["boundary_flagged"] = rep.boundary_flagged;
            j["mass_drift"] =
                std::abs(rep.rows.back().mass - rep.rows.front().mass);
            j["energy_drift"] =
                std::abs(rep.rows.back().energy - rep.rows.front().energy);
            j["config_hash"] = hash_of(cfg);
            emit(j, out_path);
            return 0;
        }
        if (ei->parsed()) {
            auto rep = eigen_report(q, {ei_band[0], ei_band[1]}, ei_res);
            nlohmann::json j = nlohmann::json::parse(eigen_report_to_json(rep));
            j["config_hash"] = hash_of(cfg);
            emit(j, out_path);
            return 0;
        }
    } catch (const RegimeError& e) {
        std::cerr << "regime error: " << e.what() << '\n';
        return 3;
    } catch (const BranchError& e) {
        std::cerr << "branch error: " << e.what() << '\n';
        return 3;
    } catch (const ToleranceError& e) {
        std::cerr << "tolerance error: " << e.what() << '\n';
        return 3;
    } catch (const IntegratorError& e) {
        std::cerr << "integrator error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace gpx::cli
