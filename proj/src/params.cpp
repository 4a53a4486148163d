#include "spinstar/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spinstar {

namespace {

// CODATA reduced Planck constant in eV s.
constexpr double kHBarEvSeconds = 6.582119569e-16;

} // namespace

double SpinStarParams::coupling(int j) const {
    if (j < 1 || j > n_spins) {
        throw std::invalid_argument("spin index " + std::to_string(j) +
                                    " outside 1.." + std::to_string(n_spins));
    }
    return couplings[static_cast<std::size_t>(j - 1)];
}

SpinStarParams make_params(int n_spins, std::vector<double> couplings,
                           double omega, double omega0) {
    if (n_spins < 1) {
        throw std::invalid_argument("n_spins must be at least 1, got " +
                                    std::to_string(n_spins));
    }
    if (couplings.size() != static_cast<std::size_t>(n_spins)) {
        throw std::invalid_argument(
            "couplings has " + std::to_string(couplings.size()) +
            " entries, expected n_spins = " + std::to_string(n_spins));
    }
    for (double alpha : couplings) {
        if (!std::isfinite(alpha)) {
            throw std::invalid_argument("couplings must be finite");
        }
    }
    if (!std::isfinite(omega) || !std::isfinite(omega0)) {
        throw std::invalid_argument("omega and omega0 must be finite");
    }
    SpinStarParams params;
    params.n_spins = n_spins;
    params.couplings = std::move(couplings);
    params.omega = omega;
    params.omega0 = omega0;
    params.detuning = omega - omega0;
    return params;
}

double sum_coupling_sq(const SpinStarParams& params) {
    double sum = 0.0;
    for (double alpha : params.couplings) sum += alpha * alpha;
    return sum;
}

double rabi_frequency(const SpinStarParams& params) {
    return std::sqrt(sum_coupling_sq(params) +
                     params.detuning * params.detuning);
}

std::optional<double> uniform_coupling(const SpinStarParams& params) {
    const double first = params.couplings.front();
    for (double alpha : params.couplings) {
        if (alpha != first) return std::nullopt;
    }
    return first;
}

double ev_to_angular_frequency(double energy_ev) {
    if (!std::isfinite(energy_ev)) {
        throw std::invalid_argument("energy must be finite");
    }
    return energy_ev / kHBarEvSeconds;
}

namespace {

double require_number(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key)) {
        throw std::invalid_argument(std::string("params: missing field '") +
                                    key + "'");
    }
    if (!doc[key].is_number()) {
        throw std::invalid_argument(std::string("params: field '") + key +
                                    "' must be a number");
    }
    return doc[key].get<double>();
}

} // namespace

SpinStarParams params_from_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("params: invalid JSON: ") +
                                    e.what());
    }
    if (!doc.is_object()) {
        throw std::invalid_argument("params: document must be a JSON object");
    }
    if (!doc.contains("n_spins") || !doc["n_spins"].is_number_integer()) {
        throw std::invalid_argument(
            "params: field 'n_spins' must be an integer");
    }
    const int n_spins = doc["n_spins"].get<int>();
    if (!doc.contains("couplings") || !doc["couplings"].is_array()) {
        throw std::invalid_argument(
            "params: field 'couplings' must be an array of numbers");
    }
    std::vector<double> couplings;
    couplings.reserve(doc["couplings"].size());
    for (const auto& entry : doc["couplings"]) {
        if (!entry.is_number()) {
            throw std::invalid_argument(
                "params: field 'couplings' must be an array of numbers");
        }
        couplings.push_back(entry.get<double>());
    }
    const double omega = require_number(doc, "omega");
    const double omega0 = require_number(doc, "omega0");
    return make_params(n_spins, std::move(couplings), omega, omega0);
}

SpinStarParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open params file: " + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return params_from_json(text.str());
}

} // namespace spinstar
