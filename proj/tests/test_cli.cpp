#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

fs::path work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("spinstar_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CmdResult run_cli(const std::string& args, const std::string& env = "") {
    const fs::path out_path = work_dir() / "stdout.txt";
    const fs::path err_path = work_dir() / "stderr.txt";
    std::string command = env.empty() ? "" : env + " ";
    command += std::string(SPINSTAR_CLI_PATH) + " " + args + " >" +
               out_path.string() + " 2>" + err_path.string();
    const int status = std::system(command.c_str());
    CmdResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

fs::path write_params(const std::string& name, const std::string& json) {
    const fs::path path = work_dir() / name;
    std::ofstream out(path);
    out << json;
    return path;
}

std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!line.empty() && (std::isalpha(line.front()) != 0)) continue;
        std::vector<double> row;
        std::istringstream fields(line);
        std::string token;
        while (std::getline(fields, token, ',')) {
            row.push_back(std::stod(token));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// last JSON object of a JSON-lines output
nlohmann::json last_json_line(const std::string& text) {
    std::istringstream lines(text);
    std::string line, last;
    while (std::getline(lines, line)) {
        if (!line.empty()) last = line;
    }
    return nlohmann::json::parse(last);
}

const std::string kResonantPair =
    R"({"n_spins": 2, "couplings": [0.6, 0.8], "omega": 1.0, "omega0": 1.0})";
const std::string kUniformFour =
    R"({"n_spins": 4, "couplings": [0.5, 0.5, 0.5, 0.5], "omega": 2.0, "omega0": 2.0})";
const std::string kNonuniform =
    R"({"n_spins": 3, "couplings": [0.3, 0.5, 0.9], "omega": 1.5, "omega0": 1.0})";

} // namespace

TEST_CASE("simulate emits a header and one row per grid point") {
    const fs::path params = write_params("pair.json", kResonantPair);
    const CmdResult result = run_cli("simulate --params " + params.string() +
                                     " --tmin 0 --tmax 2 --points 3");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("# spinstar.simulate.v1") != std::string::npos);
    CHECK(result.out.find("t,re_a,im_a,p_success,p_survival,abs_b_1,abs_b_2") !=
          std::string::npos);
    const auto rows = parse_csv_rows(result.out);
    REQUIRE(rows.size() == 3);
    // the first row is the untouched initial state
    CHECK(rows[0][0] == 0.0);
    CHECK(rows[0][1] == 1.0);
    CHECK(rows[0][3] == 0.0);
    CHECK(rows[0][4] == 1.0);
}

TEST_CASE("simulate --with-oracle reports a tiny maximum deviation") {
    const fs::path params = write_params(
        "six.json",
        R"({"n_spins": 6, "couplings": [0.2, 0.9, 0.4, 0.6, 0.3, 0.7],
            "omega": 1.3, "omega0": 0.6})");
    const CmdResult result =
        run_cli("simulate --params " + params.string() +
                " --points 40 --with-oracle");
    REQUIRE(result.exit_code == 0);
    const auto pos = result.out.find("# max_abs_deviation=");
    REQUIRE(pos != std::string::npos);
    const double deviation =
        std::stod(result.out.substr(pos + std::string("# max_abs_deviation=").size()));
    CHECK(deviation <= 1e-8);
}

TEST_CASE("simulate without a params file fails with exit code 2") {
    const CmdResult missing =
        run_cli("simulate --params /nonexistent/params.json");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("params") != std::string::npos);

    const CmdResult no_option = run_cli("simulate");
    CHECK(no_option.exit_code == 2);
}

TEST_CASE("simulate --format json carries the same table") {
    const fs::path params = write_params("pair.json", kResonantPair);
    const CmdResult result =
        run_cli("simulate --params " + params.string() +
                " --points 5 --format json");
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.out);
    CHECK(doc["schema"] == "spinstar.simulate.v1");
    CHECK(doc["rows"].size() == 5);
    CHECK(doc["columns"].size() == 7);
}

TEST_CASE("wstate at the default time succeeds with certainty") {
    const fs::path params = write_params("pair.json", kResonantPair);
    const CmdResult result =
        run_cli("wstate --params " + params.string() + " --trajectories 500");
    REQUIRE(result.exit_code == 0);
    const auto summary = last_json_line(result.out);
    CHECK(summary["summary"] == true);
    CHECK(summary["empirical_success_rate"].get<double>() == 1.0);
    CHECK(summary["predicted_success_rate"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(summary["min_success_fidelity"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("wstate Monte Carlo rate stays within three binomial sigmas") {
    const fs::path params = write_params("nonuniform.json", kNonuniform);
    const CmdResult result =
        run_cli("wstate --params " + params.string() +
                " --time 0.9 --trajectories 20000 --seed 7");
    REQUIRE(result.exit_code == 0);
    const auto summary = last_json_line(result.out);
    const double predicted =
        summary["predicted_success_rate"].get<double>();
    const double empirical =
        summary["empirical_success_rate"].get<double>();
    const double sigma =
        std::sqrt(predicted * (1.0 - predicted) / 20000.0);
    CHECK(std::abs(empirical - predicted) <= 3.0 * sigma);
}

TEST_CASE("wstate outputs are byte-identical for a fixed seed") {
    const fs::path params = write_params("nonuniform.json", kNonuniform);
    const std::string args = "wstate --params " + params.string() +
                             " --time 0.7 --trajectories 200 --seed 11";
    const CmdResult first = run_cli(args);
    const CmdResult second = run_cli(args);
    REQUIRE(first.exit_code == 0);
    CHECK(first.out == second.out);

    const CmdResult other = run_cli("wstate --params " + params.string() +
                                    " --time 0.7 --trajectories 200 --seed 12");
    CHECK(first.out != other.out);
}

TEST_CASE("the seed environment variable feeds the sampler") {
    const fs::path params = write_params("nonuniform.json", kNonuniform);
    const CmdResult flagged =
        run_cli("wstate --params " + params.string() +
                " --time 0.7 --trajectories 100 --seed 99");
    const CmdResult env_driven =
        run_cli("wstate --params " + params.string() +
                " --time 0.7 --trajectories 100",
                "SPINSTAR_SEED=99");
    REQUIRE(flagged.exit_code == 0);
    REQUIRE(env_driven.exit_code == 0);
    CHECK(flagged.out == env_driven.out);
}

TEST_CASE("ladder with the optimal schedule reaches the target rung") {
    const fs::path params = write_params("uniform4.json", kUniformFour);
    const CmdResult result =
        run_cli("ladder --params " + params.string() +
                " --k 2 --trajectories 400");
    REQUIRE(result.exit_code == 0);
    const auto summary = last_json_line(result.out);
    CHECK(summary["empirical_success_rate"].get<double>() == 1.0);
    CHECK(summary["predicted_success_rate"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(summary["schedule"].size() == 2);
    // J^2 = (N/2)(N/2+1) = 6, J_z = -N/2 + k = 0 for N = 4, k = 2
    CHECK(summary["final_j2"].get<double>() ==
          doctest::Approx(6.0).epsilon(1e-8));
    CHECK(summary["final_jz"].get<double>() ==
          doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("a one-rung ladder reproduces the wstate statistics") {
    const fs::path params = write_params("uniform4.json", kUniformFour);
    const CmdResult ladder =
        run_cli("ladder --params " + params.string() +
                " --k 1 --schedule 0.8 --trajectories 5000 --seed 5");
    const CmdResult wstate =
        run_cli("wstate --params " + params.string() +
                " --time 0.8 --trajectories 5000 --seed 5");
    REQUIRE(ladder.exit_code == 0);
    REQUIRE(wstate.exit_code == 0);
    const auto ladder_summary = last_json_line(ladder.out);
    const auto wstate_summary = last_json_line(wstate.out);
    CHECK(ladder_summary["empirical_success_rate"].get<double>() ==
          wstate_summary["empirical_success_rate"].get<double>());
    CHECK(ladder_summary["predicted_success_rate"].get<double>() ==
          doctest::Approx(
              wstate_summary["predicted_success_rate"].get<double>())
              .epsilon(1e-12));
}

TEST_CASE("ladder refuses nonuniform couplings with exit code 3") {
    const fs::path params = write_params("nonuniform.json", kNonuniform);
    const CmdResult result =
        run_cli("ladder --params " + params.string() + " --k 1");
    CHECK(result.exit_code == 3);
    CHECK(result.err.find("uniform") != std::string::npos);
}

TEST_CASE("concurrence rows keep the oracle difference below 1e-9") {
    const fs::path params = write_params("nonuniform.json", kNonuniform);
    const CmdResult result =
        run_cli("concurrence --params " + params.string() +
                " --i 1 --j 3 --points 50");
    REQUIRE(result.exit_code == 0);
    const auto rows = parse_csv_rows(result.out);
    REQUIRE(rows.size() == 50);
    for (const auto& row : rows) {
        CHECK(row[3] <= 1e-9);
    }
}

TEST_CASE("uniform resonant concurrence peaks at 2/N") {
    const fs::path params = write_params("uniform4.json", kUniformFour);
    const CmdResult result =
        run_cli("concurrence --params " + params.string() + " --points 400");
    REQUIRE(result.exit_code == 0);
    double peak = 0.0;
    for (const auto& row : parse_csv_rows(result.out)) {
        peak = std::max(peak, row[1]);
    }
    CHECK(peak == doctest::Approx(2.0 / 4.0).epsilon(1e-4));
}

TEST_CASE("concurrence rejects a clashing pair with exit code 2") {
    const fs::path params = write_params("nonuniform.json", kNonuniform);
    const CmdResult result = run_cli("concurrence --params " +
                                     params.string() + " --i 2 --j 2");
    CHECK(result.exit_code == 2);
}

TEST_CASE("robustness sweep is one at x=0 and falls off monotonically") {
    const fs::path params = write_params("pair.json", kResonantPair);
    const CmdResult result =
        run_cli("robustness --params " + params.string() + " --points 81");
    REQUIRE(result.exit_code == 0);
    const auto rows = parse_csv_rows(result.out);
    REQUIRE(rows.size() == 81);
    double previous = 2.0;
    bool found_zero = false;
    bool found_milli = false;
    for (const auto& row : rows) {
        if (row[0] == 0.0) {
            found_zero = true;
            CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-12));
        }
        if (std::abs(row[0] - 1e-3) < 1e-12) {
            found_milli = true;
            CHECK(row[1] ==
                  doctest::Approx(0.9035832116232002).epsilon(1e-9));
        }
        if (row[0] >= 0.0) {
            CHECK(row[1] <= previous + 1e-12);
            previous = row[1];
        }
    }
    CHECK(found_zero);
    CHECK(found_milli);
}

TEST_CASE("estimate --synthesize recovers the collective frequency") {
    const fs::path params = write_params("pair.json", kResonantPair);
    const fs::path series = work_dir() / "series.csv";
    const CmdResult result = run_cli(
        "estimate --params " + params.string() +
        " --synthesize --noiseless --tmin 0 --tmax 9.42477796076938 "
        "--points 64 --series-out " + series.string());
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.out);
    CHECK(std::abs(doc["omega_hat"].get<double>() - 1.0) < 1e-6);
    CHECK(std::abs(doc["sum_alpha_sq_hat"].get<double>() - 1.0) < 1e-6);
    CHECK(std::abs(
              doc["per_spin_scale_order_of_magnitude"].get<double>() -
              1.0 / std::sqrt(2.0)) < 1e-6);

    // the generated series file is valid input for --from-file
    REQUIRE(fs::exists(series));
    const CmdResult refit =
        run_cli("estimate --from-file " + series.string());
    REQUIRE(refit.exit_code == 0);
    const auto redoc = nlohmann::json::parse(refit.out);
    CHECK(redoc["omega_hat"].get<double>() ==
          doctest::Approx(doc["omega_hat"].get<double>()).epsilon(1e-12));
}

TEST_CASE("estimate --ratios approaches the squared-coupling fractions") {
    const fs::path params = write_params(
        "threefour.json",
        R"({"n_spins": 2, "couplings": [3.0, 4.0], "omega": 0.0, "omega0": 0.0})");
    const CmdResult result =
        run_cli("estimate --params " + params.string() +
                " --ratios --shots 100000 --seed 3");
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.out);
    REQUIRE(doc["ratios"].size() == 2);
    CHECK(doc["ratios"][0]["estimate"].get<double>() ==
          doctest::Approx(0.36).epsilon(0.03));
    CHECK(doc["ratios"][1]["estimate"].get<double>() ==
          doctest::Approx(0.64).epsilon(0.03));
}

TEST_CASE("estimate refuses an undersampled synthesis grid") {
    const fs::path params = write_params(
        "fast.json",
        R"({"n_spins": 2, "couplings": [1.2, 1.6], "omega": 1.0, "omega0": 1.0})");
    // Omega = 2: grid spacing 1.0 exceeds pi/(2*2)
    const CmdResult result =
        run_cli("estimate --params " + params.string() +
                " --synthesize --tmin 0 --tmax 9 --points 10 --series-out " +
                (work_dir() / "aliased.csv").string());
    CHECK(result.exit_code == 3);
    CHECK(result.err.find("alias") != std::string::npos);
}

TEST_CASE("estimate rejects an ambiguous mode choice") {
    const fs::path params = write_params("pair.json", kResonantPair);
    const CmdResult result =
        run_cli("estimate --params " + params.string() +
                " --synthesize --ratios");
    CHECK(result.exit_code == 2);
}

TEST_CASE("outputs can be routed to files") {
    const fs::path params = write_params("pair.json", kResonantPair);
    const fs::path out = work_dir() / "table.csv";
    const CmdResult result =
        run_cli("simulate --params " + params.string() +
                " --points 3 --output " + out.string());
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.empty());
    CHECK(parse_csv_rows(slurp(out)).size() == 3);
}
