// Command-line front end: closed-form sweeps with numerical cross-checks,
// conditional W-like and ladder protocol simulation, pair concurrence, and
// coupling estimation. Every command is deterministic given its
// configuration and seed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinstar/closed_form.hpp"
#include "spinstar/entanglement.hpp"
#include "spinstar/errors.hpp"
#include "spinstar/estimation.hpp"
#include "spinstar/evolution.hpp"
#include "spinstar/measurement.hpp"
#include "spinstar/params.hpp"
#include "spinstar/rng.hpp"

namespace {

using namespace spinstar;

constexpr std::uint64_t kDefaultSeed = 42;

std::string fmt(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 2 || !(lo < hi)) {
        throw std::invalid_argument(
            "time grid needs min < max and at least 2 points");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        grid[static_cast<std::size_t>(k)] =
            lo + (hi - lo) * k / (points - 1);
    }
    return grid;
}

// Writes to the given path, or to stdout for an empty path / "-".
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) {
                throw std::invalid_argument("cannot open output file: " +
                                            path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

struct CommonOptions {
    std::string params_path;
    std::string output_path;
    std::string format = "csv";
    std::uint64_t seed = kDefaultSeed;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_params = true) {
    auto* params =
        cmd->add_option("--params", opts.params_path,
                        "model parameters JSON file "
                        "({\"n_spins\", \"couplings\", \"omega\", \"omega0\"})");
    if (needs_params) params->required();
    cmd->add_option("--output,-o", opts.output_path,
                    "output file (default: stdout)");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed,
                    "master seed for all sampling (also settable via the "
                    "SPINSTAR_SEED environment variable)")
        ->envname("SPINSTAR_SEED")
        ->capture_default_str();
}

// --- simulate -------------------------------------------------------------------

int cmd_simulate(const CommonOptions& common, double tmin, double tmax,
                 int points, bool with_oracle) {
    const SpinStarParams params = load_params_file(common.params_path);
    const std::vector<double> grid = linspace(tmin, tmax, points);

    std::vector<std::string> columns{"t", "re_a", "im_a", "p_success",
                                     "p_survival"};
    for (int j = 1; j <= params.n_spins; ++j) {
        columns.push_back("abs_b_" + std::to_string(j));
    }
    if (with_oracle) {
        columns.push_back("num_re_a");
        columns.push_back("num_im_a");
        for (int j = 1; j <= params.n_spins; ++j) {
            columns.push_back("num_abs_b_" + std::to_string(j));
        }
    }

    std::optional<SectorEvolver> evolver;
    std::optional<SectorState> initial;
    if (with_oracle) {
        evolver.emplace(params, 0);
        initial = initial_central_up_state(params);
    }

    double max_abs_deviation = 0.0;
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (double t : grid) {
        std::vector<double> row;
        row.reserve(columns.size());
        const Complex a = amplitude_a(params, t);
        row.push_back(t);
        row.push_back(a.real());
        row.push_back(a.imag());
        row.push_back(success_probability(params, t));
        row.push_back(survival_probability(params, t));
        for (int j = 1; j <= params.n_spins; ++j) {
            row.push_back(std::abs(amplitude_b(params, j, t)));
        }
        if (with_oracle) {
            const SectorState numeric = evolver->evolve(*initial, t);
            const Complex a_num = numeric.amplitudes[0];
            row.push_back(a_num.real());
            row.push_back(a_num.imag());
            max_abs_deviation =
                std::max(max_abs_deviation, std::abs(a - a_num));
            for (int j = 1; j <= params.n_spins; ++j) {
                const Complex b_num = numeric.amplitudes[j];
                row.push_back(std::abs(b_num));
                max_abs_deviation = std::max(
                    max_abs_deviation,
                    std::abs(amplitude_b(params, j, t) - b_num));
            }
        }
        rows.push_back(std::move(row));
    }

    OutputTarget target(common.output_path);
    std::ostream& out = target.stream();
    if (common.format == "csv") {
        out << "# spinstar.simulate.v1\n";
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out << columns[c] << (c + 1 < columns.size() ? ',' : '\n');
        }
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                out << fmt(row[c]) << (c + 1 < row.size() ? ',' : '\n');
            }
        }
        if (with_oracle) {
            out << "# max_abs_deviation=" << fmt(max_abs_deviation) << '\n';
        }
    } else {
        nlohmann::json doc;
        doc["schema"] = "spinstar.simulate.v1";
        doc["columns"] = columns;
        doc["rows"] = rows;
        if (with_oracle) doc["max_abs_deviation"] = max_abs_deviation;
        out << doc.dump() << '\n';
    }
    return 0;
}

// --- wstate ---------------------------------------------------------------------

int cmd_wstate(const CommonOptions& common, std::optional<double> time,
               int n_index, int trajectories) {
    const SpinStarParams params = load_params_file(common.params_path);
    if (trajectories < 1) {
        throw std::invalid_argument("need at least one trajectory");
    }
    const double measure_time =
        time ? *time : optimal_time(params, n_index);

    const WStateProtocol protocol(params, measure_time, common.seed);
    const WLikeState target_state = w_like_state(params);

    OutputTarget target(common.output_path);
    std::ostream& out = target.stream();
    long successes = 0;
    double min_fidelity = 1.0;
    for (int k = 0; k < trajectories; ++k) {
        const TrajectoryRecord record =
            protocol.run(static_cast<std::uint64_t>(k));
        if (record.succeeded) {
            ++successes;
            min_fidelity =
                std::min(min_fidelity,
                         w_like_fidelity(record.final_state, target_state));
        }
        out << trajectory_to_json_line(record) << '\n';
    }
    nlohmann::json summary;
    summary["summary"] = true;
    summary["seed"] = common.seed;
    summary["measure_time"] = measure_time;
    summary["trajectories"] = trajectories;
    summary["successes"] = successes;
    summary["empirical_success_rate"] =
        static_cast<double>(successes) / trajectories;
    summary["predicted_success_rate"] = protocol.predicted_success();
    if (successes > 0) summary["min_success_fidelity"] = min_fidelity;
    out << summary.dump() << '\n';
    return 0;
}

// --- ladder ---------------------------------------------------------------------

int cmd_ladder(const CommonOptions& common, int target_k,
               const std::string& schedule_text, int trajectories) {
    const SpinStarParams params = load_params_file(common.params_path);
    const auto alpha = uniform_coupling(params);
    if (!alpha || *alpha <= 0.0) {
        throw ModelAssumptionError(
            "the ladder protocol requires a uniform positive coupling "
            "alpha_j == alpha for every j");
    }
    if (params.detuning != 0.0) {
        throw ModelAssumptionError(
            "the ladder analysis assumes zero detuning (omega == omega0)");
    }
    if (target_k < 1 || target_k > params.n_spins) {
        throw std::invalid_argument("target rung must satisfy 1 <= k <= N");
    }
    std::vector<double> schedule;
    if (schedule_text.empty()) {
        for (int i = 1; i <= target_k; ++i) {
            schedule.push_back(
                ladder_optimal_time(params.n_spins, i, *alpha, 0));
        }
    } else {
        std::istringstream fields(schedule_text);
        std::string token;
        while (std::getline(fields, token, ',')) {
            schedule.push_back(std::stod(token));
        }
        if (schedule.size() != static_cast<std::size_t>(target_k)) {
            throw std::invalid_argument(
                "schedule must list exactly k waiting times");
        }
    }

    // success-conditioned pass: evolve, project the -1 branch, reset
    SectorState state = initial_central_up_state(params);
    std::vector<double> step_probabilities;
    for (int i = 1; i <= target_k; ++i) {
        const SectorEvolver evolver(params, i - 1);
        const SectorState evolved =
            evolver.evolve(state, schedule[static_cast<std::size_t>(i - 1)]);
        const MeasurementOutcome projected = project_central(evolved, -1);
        step_probabilities.push_back(projected.probability);
        state = (i < target_k) ? reprepare_central_up(projected.collapsed)
                               : projected.collapsed;
    }
    const double j2 = expectation_j2(state);
    const double jz = expectation_jz(state);

    const LadderProtocol protocol(params.n_spins, *alpha, schedule,
                                  common.seed);
    OutputTarget target(common.output_path);
    std::ostream& out = target.stream();
    long successes = 0;
    for (int k = 0; k < trajectories; ++k) {
        const TrajectoryRecord record =
            protocol.run(static_cast<std::uint64_t>(k));
        if (record.succeeded) ++successes;
        out << trajectory_to_json_line(record) << '\n';
    }
    nlohmann::json summary;
    summary["summary"] = true;
    summary["seed"] = common.seed;
    summary["schedule"] = schedule;
    summary["step_success_probabilities"] = step_probabilities;
    summary["final_j2"] = j2;
    summary["final_jz"] = jz;
    summary["trajectories"] = trajectories;
    summary["successes"] = successes;
    summary["empirical_success_rate"] =
        static_cast<double>(successes) / trajectories;
    summary["predicted_success_rate"] = protocol.predicted_success();
    out << summary.dump() << '\n';
    return 0;
}

// --- concurrence ----------------------------------------------------------------

int cmd_concurrence(const CommonOptions& common, int i, int j, double tmin,
                    double tmax, int points) {
    const SpinStarParams params = load_params_file(common.params_path);
    const std::vector<double> grid = linspace(tmin, tmax, points);
    if (i < 1 || j < 1 || i > params.n_spins || j > params.n_spins ||
        i >= j) {
        throw std::invalid_argument(
            "pair indices must satisfy 1 <= i < j <= N");
    }
    const SectorEvolver evolver(params, 0);
    const SectorState initial = initial_central_up_state(params);

    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (double t : grid) {
        const double closed = pair_concurrence(params, i, j, t);
        const SectorState evolved = evolver.evolve(initial, t);
        const double oracle =
            wootters_concurrence(reduced_pair_density(evolved, i, j));
        rows.push_back({t, closed, oracle, std::abs(closed - oracle)});
    }

    OutputTarget target(common.output_path);
    std::ostream& out = target.stream();
    if (common.format == "csv") {
        out << "# spinstar.concurrence.v1\n";
        out << "t,c_closed,c_oracle,abs_diff\n";
        for (const auto& row : rows) {
            out << fmt(row[0]) << ',' << fmt(row[1]) << ',' << fmt(row[2])
                << ',' << fmt(row[3]) << '\n';
        }
    } else {
        nlohmann::json doc;
        doc["schema"] = "spinstar.concurrence.v1";
        doc["columns"] = {"t", "c_closed", "c_oracle", "abs_diff"};
        doc["rows"] = rows;
        out << doc.dump() << '\n';
    }
    return 0;
}

// --- robustness -----------------------------------------------------------------

int cmd_robustness(const CommonOptions& common, int n_index, double x_max,
                   int points) {
    const SpinStarParams params = load_params_file(common.params_path);
    if (!(x_max > 0.0)) {
        throw std::invalid_argument("x_max must be positive");
    }
    const std::vector<double> grid = linspace(-x_max, x_max, points);

    OutputTarget target(common.output_path);
    std::ostream& out = target.stream();
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (double x : grid) {
        rows.push_back({x, timing_robustness(params, n_index, x)});
    }
    if (common.format == "csv") {
        out << "# spinstar.robustness.v1\n";
        out << "x,p_success\n";
        for (const auto& row : rows) {
            out << fmt(row[0]) << ',' << fmt(row[1]) << '\n';
        }
    } else {
        nlohmann::json doc;
        doc["schema"] = "spinstar.robustness.v1";
        doc["columns"] = {"x", "p_success"};
        doc["rows"] = rows;
        out << doc.dump() << '\n';
    }
    return 0;
}

// --- estimate -------------------------------------------------------------------

int cmd_estimate(const CommonOptions& common, const std::string& from_file,
                 bool synthesize, bool ratios, double tmin, double tmax,
                 int points, long shots, bool noiseless, bool estimate_floor,
                 const std::string& series_out) {
    const int modes = (from_file.empty() ? 0 : 1) + (synthesize ? 1 : 0) +
                      (ratios ? 1 : 0);
    if (modes != 1) {
        throw std::invalid_argument(
            "choose exactly one of --from-file, --synthesize, --ratios");
    }

    CouplingEstimate estimate;
    if (ratios) {
        const SpinStarParams params = load_params_file(common.params_path);
        RngStream rng(common.seed);
        const std::vector<long> counts =
            simulate_ratio_sampling(params, shots, rng);
        estimate = estimate_coupling_ratios(counts);
    } else {
        ProbabilitySeries series;
        std::optional<SpinStarParams> params;
        if (!common.params_path.empty()) {
            params = load_params_file(common.params_path);
        }
        if (!from_file.empty()) {
            series = load_series_file(from_file);
        } else {
            if (!params) {
                throw std::invalid_argument(
                    "--synthesize requires --params");
            }
            const std::vector<double> grid = linspace(tmin, tmax, points);
            const double omega = rabi_frequency(*params);
            const double dt = grid[1] - grid[0];
            if (omega > 0.0 && dt > std::numbers::pi / (2.0 * omega)) {
                throw ModelAssumptionError(
                    "grid spacing " + std::to_string(dt) +
                    " exceeds pi/(2 Omega) = " +
                    std::to_string(std::numbers::pi / (2.0 * omega)) +
                    ", the sampled oscillation would alias");
            }
            RngStream rng(common.seed);
            series = simulate_survival_sampling(
                *params, grid, shots, rng,
                noiseless ? SamplingNoise::none : SamplingNoise::binomial);
            std::ofstream series_file(series_out);
            if (!series_file) {
                throw std::invalid_argument("cannot open series file: " +
                                            series_out);
            }
            write_series_csv(series_file, series);
        }
        FitOptions options;
        options.estimate_floor = estimate_floor;
        estimate = fit_collective_coupling(series, options);
        if (params) annotate_per_spin_scale(estimate, params->n_spins);
    }

    OutputTarget target(common.output_path);
    target.stream() << estimate_to_json(estimate) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "spinstar: exact dynamics, conditional state preparation, and "
        "coupling estimation for a central spin exchange-coupled to N "
        "independent spins.\n"
        "Exit codes: 0 ok, 2 usage/configuration error, 3 model-assumption "
        "violation, 4 numerical failure."};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOptions sim_common;
    double sim_tmin = 0.0, sim_tmax = 10.0;
    int sim_points = 101;
    bool sim_oracle = false;
    auto* simulate = app.add_subcommand(
        "simulate",
        "closed-form amplitudes and probabilities on a time grid");
    add_common(simulate, sim_common);
    simulate->add_option("--tmin", sim_tmin)->capture_default_str();
    simulate->add_option("--tmax", sim_tmax)->capture_default_str();
    simulate->add_option("--points", sim_points)->capture_default_str();
    simulate->add_flag("--with-oracle", sim_oracle,
                       "add numerically evolved columns and report the "
                       "maximum deviation");

    CommonOptions w_common;
    double w_time = 0.0;
    bool w_time_set = false;
    int w_n = 0;
    int w_trajectories = 1000;
    auto* wstate = app.add_subcommand(
        "wstate", "conditional W-like preparation trajectories (JSON lines)");
    add_common(wstate, w_common);
    wstate->add_option("--time", w_time,
                       "measurement time (default: the n-th optimal time)")
        ->each([&](const std::string&) { w_time_set = true; });
    wstate->add_option("--n", w_n, "optimal-time index")
        ->capture_default_str();
    wstate->add_option("--trajectories", w_trajectories)
        ->capture_default_str();

    CommonOptions l_common;
    int l_k = 1;
    std::string l_schedule;
    int l_trajectories = 1000;
    auto* ladder = app.add_subcommand(
        "ladder",
        "iterated conditional ladder toward |J = N/2, M = -N/2 + k>");
    add_common(ladder, l_common);
    ladder->add_option("--k", l_k, "number of rungs")->required();
    ladder->add_option("--schedule", l_schedule,
                       "comma-separated waiting times (default: optimal)");
    ladder->add_option("--trajectories", l_trajectories)
        ->capture_default_str();

    CommonOptions c_common;
    int c_i = 1, c_j = 2;
    double c_tmin = 0.0, c_tmax = 10.0;
    int c_points = 200;
    auto* concurrence = app.add_subcommand(
        "concurrence",
        "closed-form pair concurrence against the Wootters computation");
    add_common(concurrence, c_common);
    concurrence->add_option("--i", c_i)->capture_default_str();
    concurrence->add_option("--j", c_j)->capture_default_str();
    concurrence->add_option("--tmin", c_tmin)->capture_default_str();
    concurrence->add_option("--tmax", c_tmax)->capture_default_str();
    concurrence->add_option("--points", c_points)->capture_default_str();

    CommonOptions r_common;
    int r_n = 100;
    double r_xmax = 4e-3;
    int r_points = 161;
    auto* robustness = app.add_subcommand(
        "robustness",
        "success probability against relative timing error x");
    add_common(robustness, r_common);
    robustness->add_option("--n", r_n, "optimal-time index")
        ->capture_default_str();
    robustness->add_option("--xmax", r_xmax)->capture_default_str();
    robustness->add_option("--points", r_points)->capture_default_str();

    CommonOptions e_common;
    std::string e_from_file;
    bool e_synthesize = false, e_ratios = false, e_noiseless = false,
         e_floor = false;
    double e_tmin = 0.0, e_tmax = 10.0;
    int e_points = 64;
    long e_shots = 1000;
    std::string e_series_out = "series.csv";
    auto* estimate = app.add_subcommand(
        "estimate",
        "recover the collective frequency or per-spin coupling ratios");
    add_common(estimate, e_common, /*needs_params=*/false);
    estimate->add_option("--from-file", e_from_file,
                         "fit a measured series (CSV: t,p_hat,shots)");
    estimate->add_flag("--synthesize", e_synthesize,
                       "sample a survival series from --params, then fit");
    estimate->add_flag("--ratios", e_ratios,
                       "sample which-spin-is-up counts and estimate "
                       "alpha_j^2 ratios");
    estimate->add_option("--tmin", e_tmin)->capture_default_str();
    estimate->add_option("--tmax", e_tmax)->capture_default_str();
    estimate->add_option("--points", e_points)->capture_default_str();
    estimate->add_option("--shots", e_shots)->capture_default_str();
    estimate->add_flag("--noiseless", e_noiseless,
                       "record exact probabilities instead of binomial "
                       "frequencies");
    estimate->add_flag("--estimate-floor", e_floor,
                       "also fit the oscillation floor (detuned series)");
    estimate->add_option("--series-out", e_series_out,
                         "where --synthesize writes the generated series")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(sim_common, sim_tmin, sim_tmax, sim_points,
                                sim_oracle);
        }
        if (wstate->parsed()) {
            return cmd_wstate(
                w_common,
                w_time_set ? std::optional<double>(w_time) : std::nullopt,
                w_n, w_trajectories);
        }
        if (ladder->parsed()) {
            return cmd_ladder(l_common, l_k, l_schedule, l_trajectories);
        }
        if (concurrence->parsed()) {
            return cmd_concurrence(c_common, c_i, c_j, c_tmin, c_tmax,
                                   c_points);
        }
        if (robustness->parsed()) {
            return cmd_robustness(r_common, r_n, r_xmax, r_points);
        }
        if (estimate->parsed()) {
            return cmd_estimate(e_common, e_from_file, e_synthesize, e_ratios,
                                e_tmin, e_tmax, e_points, e_shots,
                                e_noiseless, e_floor, e_series_out);
        }
    } catch (const ModelAssumptionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 2;
}
