#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "blowup/functionals.hpp"
#include "blowup/odecmp.hpp"
#include "blowup/solver.hpp"

// Experiment driver: epsilon sweeps over PDE problems, delta sweeps over the
// comparison ODE, power-law fitting, and flat-file emission.
namespace blowup::harness {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points_used = 0;
};

// Ordinary least squares of log y on log x; needs >= 4 strictly positive
// pairs with nonzero x-variance.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& pairs);

// Worker count for sweep dispatch, capped by BLOWUP_LAB_THREADS.
int worker_count(std::size_t jobs);

// Named problem presets: "uut2+u4", "|ut|^p+|u|^q", "u4", "uut2", "linear".
solver::ProblemSpec make_problem(const std::string& preset, int n, double p, double q,
                                 double epsilon);

struct SweepConfig {
    std::string preset = "uut2+u4";
    int n = 2;
    double p = 3.0;
    double q = 4.0;
    std::vector<double> epsilons; // >= 4, strictly decreasing
    double h = 1.0 / 200;
    double cfl = 0.45;
    double threshold = 1e6;
    double t_max = 12.0;
};

struct EpsilonRun {
    double epsilon = 0.0;
    solver::LifespanRecord record;
    double T_num_hi = 0.0;
};

struct SweepResult {
    std::vector<EpsilonRun> runs;
    FitResult fit;            // log T vs log eps
    double exponent_used = 0; // predicted exponent feeding A_fit
    double A_fit = 0.0;       // max over runs of T * eps^exponent
};

// Runs solve_lifespan per epsilon (concurrently), asserts every run blew up
// with T_num strictly decreasing in epsilon, and fits T against epsilon.
SweepResult run_epsilon_sweep(const SweepConfig& config);

struct OdeSweepConfig {
    double a = 1.5;
    double alpha = 6.0;
    double beta = 4.0;
    double k = 1.0;
    std::vector<double> deltas;
    double threshold = 1e6;
    double rel_tol = 1e-9;
};

struct OdeSweepResult {
    std::vector<std::pair<double, odecmp::BlowupResult>> runs;
    FitResult fit;
    double lemma_exp = 0.0;
};

// Delta sweep plus fit; asserts |slope + lemma_exponent| <= 0.1 * lemma_exponent.
OdeSweepResult run_ode_sweep(const OdeSweepConfig& config);

// Doubles with 17 significant digits: exact double round-trips in CSV.
std::string csv_number(double x);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Run-record flat files (meta.json, series.csv, snapshots.csv) under dir.
void save_run_record(const std::filesystem::path& dir, const solver::RunRecord& rec);
solver::RunRecord load_run_record(const std::filesystem::path& dir);

nlohmann::json to_json(const solver::LifespanRecord& rec);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const functionals::MonitorReport& rep, bool include_series = false);

// Aggregates artifacts (region.json, catalog.json, ode_sweep.json,
// pde_sweep.json, monitors.json) found under input_dir into a single report
// with pass/fail verdicts for the quantitative contracts. Missing files
// leave their section absent; an input with no artifacts at all is an error.
nlohmann::json report(const std::filesystem::path& input_dir);

} // namespace blowup::harness
