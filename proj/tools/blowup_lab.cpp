// blowup-lab: numerical laboratory for lifespan scaling of semilinear wave
// equations with combined nonlinearities.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "blowup/functionals.hpp"
#include "blowup/harness.hpp"
#include "blowup/model.hpp"
#include "blowup/odecmp.hpp"
#include "blowup/solver.hpp"
#include "blowup/special.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace blowup;

namespace {

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::string cell;
    std::stringstream ss(csv);
    while (std::getline(ss, cell, ',')) if (!cell.empty()) out.push_back(std::stod(cell));
    return out;
}

void emit(const json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        fs::path p(path);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream(p) << j.dump(2) << "\n";
    }
}

json region_record(int n, double p, double q) {
    const auto verdict = model::admissible({n, p, q});
    json j{{"n", n}, {"p", p}, {"q", q},
           {"admissible", verdict == model::Admissibility::admissible}};
    if (verdict != model::Admissibility::admissible) j["violation"] = model::to_string(verdict);
    try {
        j["predicted_exponent"] = model::predicted_exponent(n, p, q);
    } catch (const std::exception&) {
        j["predicted_exponent"] = nullptr;
    }
    return j;
}

json catalog_record(int n, int alpha, const std::vector<std::string>& flag_names) {
    std::vector<model::CatalogFlag> flags;
    for (const auto& f : flag_names) flags.push_back(model::catalog_flag_from_string(f));
    const auto order = model::lifespan_lower_bound(n, alpha, flags);
    return {{"n", n},
            {"alpha", alpha},
            {"flags", flag_names},
            {"order_kind", model::to_string(order.kind)},
            {"order_exponent", order.exponent}};
}

// Monitors applicable to a recorded run, selected by its nonlinearity shape.
json run_monitors(const solver::RunRecord& rec, bool series) {
    json out = json::array();
    bool mixed = false, has_ut_p = false, has_u_q = false;
    double p = 0.0, q = 0.0;
    for (const auto& t : rec.terms) {
        if (t.u_exponent > 0.0 && t.ut_exponent > 0.0) mixed = true;
        if (t.u_exponent == 0.0 && t.ut_exponent > 0.0) {
            has_ut_p = true;
            p = t.ut_exponent;
        }
        if (t.ut_exponent == 0.0 && t.u_exponent > 0.0) {
            has_u_q = true;
            q = t.u_exponent;
        }
    }

    if (mixed) { // the u u_t^2 + u^4 family
        out.push_back(harness::to_json(functionals::monitor_cone_pointwise(rec), series));
        out.push_back(harness::to_json(functionals::monitor_mass_growth(rec, 3.0, 1.5), series));
        out.push_back(harness::to_json(functionals::monitor_ode_ratio(rec, 6.0, 4.0), series));
    } else if (has_ut_p && has_u_q) { // the |u_t|^p + |u|^q family
        const int n = rec.n;
        out.push_back(harness::to_json(functionals::monitor_weighted_velocity(rec), series));
        out.push_back(harness::to_json(functionals::monitor_velocity_lp(rec, p, n), series));
        out.push_back(harness::to_json(
            functionals::monitor_mass_growth(rec, p, 2.0 - 0.5 * (n - 1) * (p - 2.0)), series));
        out.push_back(
            harness::to_json(functionals::monitor_ode_ratio(rec, n * (q - 1.0), q), series));
        if (!rec.psi_lp.empty())
            out.push_back(harness::to_json(functionals::monitor_holder_chain(rec, p), series));
    } else {
        throw std::runtime_error("monitor: run's nonlinearity has no monitor set");
    }

    const double horizon =
        rec.status == solver::RunStatus::blew_up ? 0.9 * rec.T_num : rec.times.back();
    out.push_back({{"name", "mass_identity"},
                   {"max_rel_residual", functionals::identity_residual(rec, horizon)}});
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blow-up laboratory for semilinear wave equations"};
    app.set_config("--config");
    app.require_subcommand(1);

    // region
    auto* region = app.add_subcommand("region", "Admissibility and lifespan exponent of (n,p,q)");
    int r_n = 2;
    double r_p = 3.0, r_q = 4.0;
    std::string r_out;
    region->add_option("--n", r_n, "space dimension");
    region->add_option("--p", r_p, "u_t power");
    region->add_option("--q", r_q, "u power");
    region->add_option("--out", r_out, "write JSON here instead of stdout");

    // table1
    auto* table = app.add_subcommand("table1", "Sharp lifespan lower-bound catalog lookup");
    int t_n = 2, t_alpha = 1;
    std::vector<std::string> t_flags;
    std::string t_out;
    table->add_option("--n", t_n, "space dimension");
    table->add_option("--alpha", t_alpha, "nonlinearity order");
    table->add_option("--flags", t_flags,
                      "structural flags: int_g_zero d2u_zero d3u_zero d3u_d4u_zero");
    table->add_option("--out", t_out, "write JSON here instead of stdout");

    // phi1
    auto* phi = app.add_subcommand("phi1", "Sample phi1 and its growth-bound ratio as CSV");
    int p_n = 2, p_samples = 200, p_nodes = 256;
    double p_rmax = 20.0;
    std::string p_out;
    phi->add_option("--n", p_n, "space dimension");
    phi->add_option("--r-max", p_rmax, "sampling range");
    phi->add_option("--samples", p_samples, "sample count");
    phi->add_option("--nodes", p_nodes, "quadrature nodes");
    phi->add_option("--out", p_out, "CSV path (default stdout)");

    // ode-sweep
    auto* ode = app.add_subcommand("ode-sweep", "Delta sweep of the comparison-ODE blow-up time");
    harness::OdeSweepConfig ocfg;
    std::string o_deltas = "0.1,0.0631,0.0398,0.0251,0.0158,0.01";
    std::string o_csv, o_json;
    ode->add_option("--a", ocfg.a, "growth hypothesis power");
    ode->add_option("--alpha", ocfg.alpha, "source decay power");
    ode->add_option("--beta", ocfg.beta, "source nonlinearity power");
    ode->add_option("--k", ocfg.k, "source constant");
    ode->add_option("--deltas", o_deltas, "comma-separated, strictly decreasing");
    ode->add_option("--threshold", ocfg.threshold, "blow-up threshold (>= 1e6)");
    ode->add_option("--rel-tol", ocfg.rel_tol, "integration tolerance");
    ode->add_option("--csv", o_csv, "CSV output path (default stdout)");
    ode->add_option("--out", o_json, "JSON fit summary path (default stdout)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Single lifespan run of the radial solver");
    int s_n = 2;
    double s_eps = 1.0, s_p = 3.0, s_q = 4.0, s_h = 1.0 / 200, s_cfl = 0.45, s_tmax = 12.0,
           s_threshold = 1e6;
    std::string s_preset = "uut2+u4", s_output, s_out;
    sim->add_option("--n", s_n, "space dimension");
    sim->add_option("--epsilon", s_eps, "data amplitude");
    sim->add_option("--nonlinearity", s_preset, "uut2+u4 | |ut|^p+|u|^q | u4 | uut2 | linear");
    sim->add_option("--p", s_p, "u_t power (pq preset)");
    sim->add_option("--q", s_q, "u power (pq preset)");
    sim->add_option("--h", s_h, "cell width");
    sim->add_option("--cfl", s_cfl, "dt / h");
    sim->add_option("--t-max", s_tmax, "time horizon");
    sim->add_option("--threshold", s_threshold, "sup-norm blow-up threshold");
    sim->add_option("--output", s_output, "run-record directory (series + snapshots)");
    sim->add_option("--out", s_out, "lifespan JSON path (default stdout)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Epsilon sweep of PDE lifespans with power-law fit");
    harness::SweepConfig scfg;
    std::string w_eps = "1.4,1.2,1.0,0.85,0.7,0.6", w_out, w_csv;
    sweep->add_option("--preset", scfg.preset, "nonlinearity preset");
    sweep->add_option("--n", scfg.n, "space dimension");
    sweep->add_option("--p", scfg.p, "u_t power (pq preset)");
    sweep->add_option("--q", scfg.q, "u power (pq preset)");
    sweep->add_option("--epsilons", w_eps, "comma-separated, strictly decreasing");
    sweep->add_option("--h", scfg.h, "cell width");
    sweep->add_option("--cfl", scfg.cfl, "dt / h");
    sweep->add_option("--threshold", scfg.threshold, "sup-norm blow-up threshold");
    sweep->add_option("--t-max", scfg.t_max, "time horizon");
    sweep->add_option("--csv", w_csv, "CSV output path (default stdout)");
    sweep->add_option("--out", w_out, "JSON output path (default stdout)");

    // monitor
    auto* mon = app.add_subcommand("monitor", "Proof-inequality monitors over a recorded run");
    std::string m_run, m_out;
    bool m_series = false;
    mon->add_option("--run", m_run, "run-record directory (from simulate --output)")->required();
    mon->add_option("--out", m_out, "JSON output path (default stdout)");
    mon->add_flag("--series", m_series, "include full lhs/rhs series");

    // report
    auto* rep = app.add_subcommand("report", "Aggregate artifacts into one pass/fail report");
    std::string rep_in, rep_out;
    rep->add_option("--input", rep_in, "artifact directory")->required();
    rep->add_option("--out", rep_out, "JSON output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*region) {
            emit(region_record(r_n, r_p, r_q), r_out);
        } else if (*table) {
            emit(catalog_record(t_n, t_alpha, t_flags), t_out);
        } else if (*phi) {
            special::Phi1Evaluator ev(p_n, p_nodes);
            std::ostringstream csv;
            csv << "r,phi1,bound_ratio\n";
            for (int i = 0; i < p_samples; ++i) {
                const double r = p_rmax * i / (p_samples - 1);
                const double v = ev.phi1(r);
                const double ratio = v * std::exp(-r) * std::pow(1.0 + r, 0.5 * (p_n - 1));
                csv << harness::csv_number(r) << "," << harness::csv_number(v) << ","
                    << harness::csv_number(ratio) << "\n";
            }
            if (p_out.empty())
                std::cout << csv.str();
            else
                std::ofstream(p_out) << csv.str();
        } else if (*ode) {
            ocfg.deltas = parse_list(o_deltas);
            const auto res = harness::run_ode_sweep(ocfg);
            std::vector<std::vector<double>> rows;
            for (const auto& [d, r] : res.runs)
                rows.push_back({d, r.blow_time, r.certified ? 1.0 : 0.0});
            if (o_csv.empty()) {
                std::cout << "delta,blow_time,certified\n";
                for (const auto& row : rows)
                    std::cout << harness::csv_number(row[0]) << ","
                              << harness::csv_number(row[1]) << "," << int(row[2]) << "\n";
            } else {
                harness::write_csv(o_csv, {"delta", "blow_time", "certified"}, rows);
            }
            json j{{"fit", harness::to_json(res.fit)}, {"lemma_exponent", res.lemma_exp}};
            emit(j, o_json);
        } else if (*sim) {
            auto prob = harness::make_problem(s_preset, s_n, s_p, s_q, s_eps);
            const auto grid = solver::RadialGrid::for_horizon(s_tmax, s_h);
            solver::RunOptions opt;
            opt.cfl = s_cfl;
            opt.blow_threshold = s_threshold;
            opt.t_max = s_tmax;
            std::optional<special::Phi1Evaluator> phi_ev;
            if (s_preset == "|ut|^p+|u|^q" || s_preset == "pq") {
                phi_ev.emplace(s_n);
                opt.phi = &*phi_ev;
                opt.holder_p = s_p;
            }
            solver::RunRecord rec;
            const auto record = solver::solve_lifespan(prob, grid, opt, &rec);
            json j = harness::to_json(record);
            j["T_num_hi"] = rec.T_num_hi;
            j["support_excess"] = rec.support_excess;
            if (!prob.nonlinearity) j["energy_drift_per_time"] = rec.energy_drift_per_time;
            if (!s_output.empty()) {
                harness::save_run_record(s_output, rec);
                j["run_record"] = s_output;
            }
            emit(j, s_out);
        } else if (*sweep) {
            scfg.epsilons = parse_list(w_eps);
            const auto res = harness::run_epsilon_sweep(scfg);
            std::vector<std::vector<double>> rows;
            json jruns = json::array();
            for (const auto& r : res.runs) {
                rows.push_back({r.epsilon, r.record.T_num, r.record.refinement_ratio});
                jruns.push_back({{"epsilon", r.epsilon},
                                 {"record", harness::to_json(r.record)},
                                 {"T_num_hi", r.T_num_hi}});
            }
            if (!w_csv.empty())
                harness::write_csv(w_csv, {"epsilon", "T_num", "refinement_ratio"}, rows);
            json j{{"runs", jruns},
                   {"fit", harness::to_json(res.fit)},
                   {"exponent_used", res.exponent_used},
                   {"A_fit", res.A_fit}};
            emit(j, w_out);
        } else if (*mon) {
            const auto rec = harness::load_run_record(m_run);
            emit(run_monitors(rec, m_series), m_out);
        } else if (*rep) {
            emit(harness::report(rep_in), rep_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
