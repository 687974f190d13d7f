#include "blowup/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "blowup/model.hpp"

namespace blowup::harness {

namespace fs = std::filesystem;
using nlohmann::json;

FitResult fit_power_law(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 4) throw std::invalid_argument("fit_power_law: need >= 4 points");
    const int n = int(pairs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : pairs) {
        if (!(x > 0.0 && y > 0.0))
            throw std::invalid_argument("fit_power_law: coordinates must be positive");
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double var_x = sxx - sx * sx / n;
    if (!(var_x > 0.0)) throw std::invalid_argument("fit_power_law: x values degenerate");

    FitResult fit;
    fit.points_used = n;
    fit.slope = (sxy - sx * sy / n) / var_x;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (const auto& [x, y] : pairs) {
        const double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

int worker_count(std::size_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("BLOWUP_LAB_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, unsigned(cap));
    }
    return int(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

solver::ProblemSpec make_problem(const std::string& preset, int n, double p, double q,
                                 double epsilon) {
    solver::ProblemSpec prob;
    prob.n = n;
    prob.data.g_profile = solver::default_g;
    prob.data.epsilon = epsilon;
    prob.data.nonneg = true;
    if (preset == "uut2+u4")
        prob.nonlinearity = model::NonlinearitySpec::u_ut2_plus_u4();
    else if (preset == "|ut|^p+|u|^q" || preset == "pq")
        prob.nonlinearity = model::NonlinearitySpec::abs_ut_p_plus_abs_u_q(p, q);
    else if (preset == "u4")
        prob.nonlinearity = model::NonlinearitySpec::u4();
    else if (preset == "uut2")
        prob.nonlinearity = model::NonlinearitySpec::u_ut2();
    else if (preset == "linear")
        prob.nonlinearity.reset();
    else
        throw std::invalid_argument("unknown nonlinearity preset: " + preset);
    return prob;
}

SweepResult run_epsilon_sweep(const SweepConfig& config) {
    if (config.epsilons.size() < 4)
        throw std::invalid_argument("run_epsilon_sweep: need >= 4 epsilons");
    for (std::size_t i = 0; i < config.epsilons.size(); ++i) {
        if (!(config.epsilons[i] > 0.0))
            throw std::invalid_argument("run_epsilon_sweep: epsilons must be > 0");
        if (i > 0 && !(config.epsilons[i] < config.epsilons[i - 1]))
            throw std::invalid_argument("run_epsilon_sweep: epsilons must be strictly decreasing");
    }

    const solver::RadialGrid grid = solver::RadialGrid::for_horizon(config.t_max, config.h);
    const std::size_t nruns = config.epsilons.size();
    std::vector<EpsilonRun> runs(nruns);
    std::vector<std::string> errors(nruns);

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= nruns) return;
            try {
                solver::ProblemSpec prob = make_problem(config.preset, config.n, config.p,
                                                        config.q, config.epsilons[i]);
                solver::RunOptions opt;
                opt.cfl = config.cfl;
                opt.blow_threshold = config.threshold;
                opt.t_max = config.t_max;
                solver::RunRecord rec;
                runs[i].epsilon = config.epsilons[i];
                runs[i].record = solver::solve_lifespan(prob, grid, opt, &rec);
                runs[i].T_num_hi = rec.T_num_hi;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int workers = worker_count(nruns);
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    std::string diag;
    for (std::size_t i = 0; i < nruns; ++i) {
        if (!errors[i].empty())
            diag += "eps=" + std::to_string(config.epsilons[i]) + ": " + errors[i] + "; ";
        else if (runs[i].record.status != solver::RunStatus::blew_up)
            diag += "eps=" + std::to_string(config.epsilons[i]) + ": " +
                    solver::to_string(runs[i].record.status) + "; ";
    }
    if (!diag.empty()) throw std::runtime_error("run_epsilon_sweep failed: " + diag);

    for (std::size_t i = 1; i < nruns; ++i)
        if (!(runs[i].record.T_num > runs[i - 1].record.T_num))
            throw std::runtime_error("run_epsilon_sweep: T_num not strictly decreasing in eps");

    SweepResult out;
    out.runs = runs;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : runs) pts.emplace_back(r.epsilon, r.record.T_num);
    out.fit = fit_power_law(pts);
    // The combined-nonlinearity exponent; the mixed preset matches (2, 3, 4).
    out.exponent_used = config.preset == "uut2+u4"
                            ? model::predicted_exponent(2, 3.0, 4.0)
                            : model::predicted_exponent(config.n, config.p, config.q);
    out.A_fit = 0.0;
    for (const auto& r : runs)
        out.A_fit = std::max(out.A_fit,
                             r.record.T_num * std::pow(r.epsilon, out.exponent_used));
    return out;
}

OdeSweepResult run_ode_sweep(const OdeSweepConfig& config) {
    odecmp::OdeProblem tmpl;
    tmpl.a = config.a;
    tmpl.alpha = config.alpha;
    tmpl.beta = config.beta;
    tmpl.k = config.k;
    tmpl.delta = config.deltas.empty() ? 1.0 : config.deltas.front();
    tmpl.F0 = tmpl.delta;
    tmpl.F0prime = tmpl.a * tmpl.delta;

    OdeSweepResult out;
    out.lemma_exp = odecmp::lemma_exponent(config.a, config.alpha, config.beta);
    out.runs = odecmp::delta_sweep(tmpl, config.deltas, config.threshold, config.rel_tol);

    std::vector<std::pair<double, double>> pts;
    for (const auto& [d, r] : out.runs) pts.emplace_back(d, r.blow_time);
    out.fit = fit_power_law(pts);

    if (!(std::fabs(out.fit.slope + out.lemma_exp) <= 0.1 * out.lemma_exp))
        throw std::runtime_error("run_ode_sweep: fitted slope " +
                                 std::to_string(out.fit.slope) +
                                 " outside 10% of -" + std::to_string(out.lemma_exp));
    return out;
}

std::string csv_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << csv_number(row[i]);
        out << "\n";
    }
}

namespace {

solver::RunStatus status_from_string(const std::string& s) {
    if (s == "blew_up") return solver::RunStatus::blew_up;
    if (s == "reached_t_max") return solver::RunStatus::reached_t_max;
    if (s == "unstable") return solver::RunStatus::unstable;
    throw std::invalid_argument("unknown run status: " + s);
}

std::vector<std::vector<double>> read_csv(const fs::path& path, std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
    std::string line;
    std::vector<std::vector<double>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (first) {
            while (std::getline(ss, cell, ',')) header->push_back(cell);
            first = false;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

void save_run_record(const fs::path& dir, const solver::RunRecord& rec) {
    fs::create_directories(dir);

    json meta;
    meta["n"] = rec.n;
    meta["epsilon"] = rec.epsilon;
    meta["h"] = rec.h;
    meta["holder_p"] = rec.holder_p;
    meta["status"] = solver::to_string(rec.status);
    meta["T_num"] = rec.T_num;
    meta["T_num_hi"] = rec.T_num_hi;
    meta["peak_r"] = rec.peak_r;
    meta["support_excess"] = rec.support_excess;
    meta["energy_drift_per_time"] = rec.energy_drift_per_time;
    meta["terms"] = json::array();
    for (const auto& t : rec.terms)
        meta["terms"].push_back({{"coefficient", t.coefficient},
                                 {"u_exponent", t.u_exponent},
                                 {"ut_exponent", t.ut_exponent},
                                 {"u_absolute", t.u_absolute},
                                 {"ut_absolute", t.ut_absolute}});
    std::ofstream(dir / "meta.json") << meta.dump(2) << "\n";

    std::vector<std::string> header{"t", "max_abs_u", "mass", "source_mass", "min_u", "energy"};
    for (std::size_t ti = 0; ti < rec.term_mass.size(); ++ti)
        header.push_back("term" + std::to_string(ti));
    const bool has_psi = !rec.weighted_velocity.empty();
    if (has_psi) header.push_back("weighted_velocity");
    const bool has_lp = !rec.psi_lp.empty();
    if (has_lp) header.push_back("psi_lp");

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        std::vector<double> row{rec.times[i], rec.max_abs_u[i], rec.mass[i],
                                rec.source_mass[i], rec.min_u[i], rec.energy[i]};
        for (const auto& tm : rec.term_mass) row.push_back(tm[i]);
        if (has_psi) row.push_back(rec.weighted_velocity[i]);
        if (has_lp) row.push_back(rec.psi_lp[i]);
        rows.push_back(std::move(row));
    }
    write_csv(dir / "series.csv", header, rows);

    std::vector<std::vector<double>> snap_rows;
    for (std::size_t s = 0; s < rec.snapshots.size(); ++s) {
        const auto& snap = rec.snapshots[s];
        for (std::size_t j = 0; j < snap.u.size(); ++j)
            snap_rows.push_back({double(s), snap.t, (double(j) + 0.5) * rec.h, snap.u[j],
                                 snap.v[j]});
    }
    write_csv(dir / "snapshots.csv", {"snapshot", "t", "r", "u", "v"}, snap_rows);
}

solver::RunRecord load_run_record(const fs::path& dir) {
    std::ifstream meta_in(dir / "meta.json");
    if (!meta_in) throw std::runtime_error("load_run_record: missing meta.json in " + dir.string());
    json meta = json::parse(meta_in);

    solver::RunRecord rec;
    rec.n = meta.at("n").get<int>();
    rec.epsilon = meta.at("epsilon").get<double>();
    rec.h = meta.at("h").get<double>();
    rec.holder_p = meta.value("holder_p", 0.0);
    rec.status = status_from_string(meta.at("status").get<std::string>());
    rec.T_num = meta.at("T_num").get<double>();
    rec.T_num_hi = meta.value("T_num_hi", 0.0);
    rec.peak_r = meta.value("peak_r", 0.0);
    rec.support_excess = meta.value("support_excess", 0.0);
    rec.energy_drift_per_time = meta.value("energy_drift_per_time", 0.0);
    for (const auto& t : meta.at("terms"))
        rec.terms.push_back({t.at("coefficient").get<double>(), t.at("u_exponent").get<double>(),
                             t.at("ut_exponent").get<double>(), t.at("u_absolute").get<bool>(),
                             t.at("ut_absolute").get<bool>()});

    std::vector<std::string> header;
    const auto rows = read_csv(dir / "series.csv", &header);
    rec.term_mass.assign(rec.terms.size(), {});
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            const std::string& h = header[c];
            const double v = row[c];
            if (h == "t") rec.times.push_back(v);
            else if (h == "max_abs_u") rec.max_abs_u.push_back(v);
            else if (h == "mass") rec.mass.push_back(v);
            else if (h == "source_mass") rec.source_mass.push_back(v);
            else if (h == "min_u") rec.min_u.push_back(v);
            else if (h == "energy") rec.energy.push_back(v);
            else if (h == "weighted_velocity") rec.weighted_velocity.push_back(v);
            else if (h == "psi_lp") rec.psi_lp.push_back(v);
            else if (h.rfind("term", 0) == 0)
                rec.term_mass[std::stoul(h.substr(4))].push_back(v);
        }
    }

    std::vector<std::string> snap_header;
    const auto snap_rows = read_csv(dir / "snapshots.csv", &snap_header);
    for (const auto& row : snap_rows) {
        const std::size_t s = std::size_t(row[0]);
        if (s >= rec.snapshots.size()) {
            rec.snapshots.resize(s + 1);
            rec.snapshots[s].t = row[1];
        }
        rec.snapshots[s].u.push_back(row[3]);
        rec.snapshots[s].v.push_back(row[4]);
    }
    return rec;
}

json to_json(const solver::LifespanRecord& rec) {
    return {{"T_num", rec.T_num},
            {"peak_r", rec.peak_r},
            {"refinement_ratio", rec.refinement_ratio},
            {"status", solver::to_string(rec.status)}};
}

json to_json(const FitResult& fit) {
    return {{"slope", fit.slope},
            {"intercept", fit.intercept},
            {"r2", fit.r_squared},
            {"points_used", fit.points_used}};
}

json to_json(const functionals::MonitorReport& rep, bool include_series) {
    json j{{"name", rep.name},
           {"min_margin", rep.min_margin},
           {"fitted_constant", rep.fitted_constant},
           {"samples", rep.times.size()}};
    if (include_series) {
        j["times"] = rep.times;
        j["lhs"] = rep.lhs;
        j["rhs"] = rep.rhs;
    }
    return j;
}

json report(const fs::path& input_dir) {
    json rep;
    rep["sections"] = json::object();
    json checks = json::array();
    bool any = false;

    auto load = [&](const char* name) -> json {
        std::ifstream in(input_dir / name);
        if (!in) return json();
        any = true;
        return json::parse(in);
    };

    if (json region = load("region.json"); !region.is_null()) rep["sections"]["region"] = region;
    if (json catalog = load("catalog.json"); !catalog.is_null())
        rep["sections"]["catalog"] = catalog;

    if (json ode = load("ode_sweep.json"); !ode.is_null()) {
        rep["sections"]["ode_sweep"] = ode;
        const double slope = ode.at("fit").at("slope").get<double>();
        const double expo = ode.at("lemma_exponent").get<double>();
        checks.push_back({{"name", "ode_slope_within_10pct"},
                          {"value", slope},
                          {"target", -expo},
                          {"pass", std::fabs(slope + expo) <= 0.1 * expo}});
    }

    if (json sweep = load("pde_sweep.json"); !sweep.is_null()) {
        rep["sections"]["pde_sweep"] = sweep;
        bool mono = true, refined = true, blew = true;
        double prev_T = 0.0;
        bool first = true;
        for (const auto& run : sweep.at("runs")) {
            const double T = run.at("record").at("T_num").get<double>();
            blew = blew && run.at("record").at("status").get<std::string>() == "blew_up";
            refined = refined && run.at("record").at("refinement_ratio").get<double>() < 0.05;
            if (!first) mono = mono && T > prev_T;
            prev_T = T;
            first = false;
        }
        checks.push_back({{"name", "pde_all_blew_up"}, {"pass", blew}});
        checks.push_back({{"name", "pde_T_decreasing_in_eps"}, {"pass", mono}});
        checks.push_back({{"name", "pde_refinement_within_5pct"}, {"pass", refined}});
    }

    if (json monitors = load("monitors.json"); !monitors.is_null()) {
        rep["sections"]["monitors"] = monitors;
        for (const auto& m : monitors) {
            const std::string name = m.at("name").get<std::string>();
            if (name == "holder_chain") {
                checks.push_back({{"name", "monitor_" + name + "_holds"},
                                  {"value", m.at("min_margin").get<double>()},
                                  {"pass", m.at("min_margin").get<double>() >= -1e-9}});
            } else if (m.contains("fitted_constant")) {
                checks.push_back({{"name", "monitor_" + name + "_positive"},
                                  {"value", m.at("fitted_constant").get<double>()},
                                  {"pass", m.at("fitted_constant").get<double>() > 0.0}});
            }
        }
    }

    if (!any) throw std::runtime_error("report: no artifacts found under " + input_dir.string());

    bool all = true;
    for (const auto& c : checks) all = all && c.at("pass").get<bool>();
    rep["checks"] = checks;
    rep["pass"] = all;
    return rep;
}

} // namespace blowup::harness
