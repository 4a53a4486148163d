#include "spinstar/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spinstar/closed_form.hpp"
#include "spinstar/errors.hpp"

namespace spinstar {

namespace {

constexpr double kZ95 = 1.959963984540054; // two-sided 95% normal quantile

void validate_series(const ProbabilitySeries& series) {
    double prev = -std::numeric_limits<double>::infinity();
    for (const ProbabilityPoint& point : series.points) {
        if (!std::isfinite(point.time) || point.time <= prev) {
            throw std::invalid_argument(
                "series times must be finite and strictly increasing");
        }
        prev = point.time;
        if (!(point.probability_estimate >= 0.0 &&
              point.probability_estimate <= 1.0)) {
            throw std::invalid_argument(
                "probability estimates must lie in [0, 1]");
        }
        if (point.shots < 1) {
            throw std::invalid_argument("shots must be at least 1");
        }
    }
}

long sample_binomial(long shots, double p, RngStream& rng) {
    long count = 0;
    for (long s = 0; s < shots; ++s) {
        if (rng.next_uniform() < p) ++count;
    }
    return count;
}

} // namespace

ProbabilitySeries simulate_survival_sampling(const SpinStarParams& params,
                                             std::span<const double> times,
                                             long shots_per_point,
                                             RngStream& rng,
                                             SamplingNoise noise) {
    if (shots_per_point < 1) {
        throw std::invalid_argument("shots_per_point must be at least 1");
    }
    ProbabilitySeries series;
    series.points.reserve(times.size());
    for (double t : times) {
        const double p = survival_probability(params, t);
        double estimate = p;
        if (noise == SamplingNoise::binomial) {
            estimate = static_cast<double>(
                           sample_binomial(shots_per_point, p, rng)) /
                       static_cast<double>(shots_per_point);
        }
        series.points.push_back({t, estimate, shots_per_point});
    }
    validate_series(series);
    return series;
}

namespace {

struct FitModel {
    double omega = 0.0;
    double floor = 0.0;
};

double model_value(const FitModel& m, double t) {
    const double c = std::cos(m.omega * t);
    return m.floor + (1.0 - m.floor) * c * c;
}

// Coarse frequency of the centred signal 2 p - 1 from a dense spectral
// scan; the signal oscillates at twice the collective frequency.
double coarse_frequency(const ProbabilitySeries& series) {
    const std::size_t n = series.points.size();
    const double span = series.points.back().time - series.points.front().time;
    double dt_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < n; ++k) {
        dt_min = std::min(dt_min,
                          series.points[k].time - series.points[k - 1].time);
    }
    const double omega_lo = std::numbers::pi / span;
    const double omega_hi = std::numbers::pi / dt_min;
    const double step = 2.0 * std::numbers::pi / (16.0 * span);
    const std::size_t count = std::min<std::size_t>(
        400000, static_cast<std::size_t>((omega_hi - omega_lo) / step) + 1);

    double best_omega = omega_lo;
    double best_power = -1.0;
    for (std::size_t s = 0; s < count; ++s) {
        const double omega = omega_lo + static_cast<double>(s) * step;
        std::complex<double> sum = 0.0;
        for (const ProbabilityPoint& point : series.points) {
            const double y = 2.0 * point.probability_estimate - 1.0;
            sum += y * std::polar(1.0, -omega * point.time);
        }
        const double power = std::norm(sum);
        if (power > best_power) {
            best_power = power;
            best_omega = omega;
        }
    }
    return 0.5 * best_omega; // centred signal frequency -> Omega
}

} // namespace

CouplingEstimate fit_collective_coupling(const ProbabilitySeries& series,
                                         const FitOptions& options) {
    validate_series(series);
    const std::size_t n = series.points.size();
    if (n < 8) {
        throw std::invalid_argument(
            "frequency fit needs at least 8 points, got " +
            std::to_string(n));
    }

    const double omega_coarse = coarse_frequency(series);
    if (!(omega_coarse > 0.0)) {
        throw NumericalError("coarse frequency search found no oscillation");
    }
    const double span =
        series.points.back().time - series.points.front().time;
    const double coarse_period = std::numbers::pi / omega_coarse;
    if (span < 1.5 * coarse_period) {
        throw ModelAssumptionError(
            "series too short: spans " + std::to_string(span / coarse_period) +
            " oscillation periods, need at least 1.5");
    }
    double dt_max = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        dt_max = std::max(dt_max,
                          series.points[k].time - series.points[k - 1].time);
    }
    if (dt_max > std::numbers::pi / (2.0 * omega_coarse)) {
        throw ModelAssumptionError(
            "sampling interval " + std::to_string(dt_max) +
            " exceeds pi/(2 Omega), the series is aliased");
    }

    // per-point binomial standard deviations, with a pseudo-count so nodes
    // where p_hat hits 0 or 1 keep a finite weight
    std::vector<double> sigma(n);
    for (std::size_t k = 0; k < n; ++k) {
        const ProbabilityPoint& point = series.points[k];
        const double shots = static_cast<double>(point.shots);
        const double p_smooth =
            (shots * point.probability_estimate + 1.0) / (shots + 2.0);
        sigma[k] = std::sqrt(p_smooth * (1.0 - p_smooth) / shots);
    }

    FitModel fit{omega_coarse, 0.0};
    const int n_params = options.estimate_floor ? 2 : 1;
    double lambda = 1e-3; // Levenberg damping
    bool converged = false;
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        // accumulate the weighted normal equations
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0;
        double jtr0 = 0.0, jtr1 = 0.0;
        double sse = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double t = series.points[k].time;
            const double w = 1.0 / sigma[k];
            const double r =
                (model_value(fit, t) -
                 series.points[k].probability_estimate) * w;
            const double d_omega =
                -(1.0 - fit.floor) * t * std::sin(2.0 * fit.omega * t) * w;
            const double s = std::sin(fit.omega * t);
            const double d_floor = s * s * w;
            sse += r * r;
            jtj00 += d_omega * d_omega;
            jtr0 += d_omega * r;
            if (n_params == 2) {
                jtj01 += d_omega * d_floor;
                jtj11 += d_floor * d_floor;
                jtr1 += d_floor * r;
            }
        }
        double step_omega = 0.0;
        double step_floor = 0.0;
        if (n_params == 1) {
            step_omega = -jtr0 / (jtj00 * (1.0 + lambda));
        } else {
            const double a00 = jtj00 * (1.0 + lambda);
            const double a11 = jtj11 * (1.0 + lambda);
            const double det = a00 * a11 - jtj01 * jtj01;
            if (det == 0.0) {
                throw NumericalError("singular normal equations in fit");
            }
            step_omega = (-jtr0 * a11 + jtr1 * jtj01) / det;
            step_floor = (-jtr1 * a00 + jtr0 * jtj01) / det;
        }
        const double rel_step =
            std::abs(step_omega) / std::max(std::abs(fit.omega), 1e-12);
        if (rel_step < options.step_tolerance) {
            converged = true; // stationary point of the damped step
            break;
        }
        FitModel trial{fit.omega + step_omega,
                       std::clamp(fit.floor + step_floor, 0.0, 0.999)};
        double trial_sse = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double r = (model_value(trial, series.points[k].time) -
                              series.points[k].probability_estimate) /
                             sigma[k];
            trial_sse += r * r;
        }
        if (trial_sse <= sse * (1.0 + 1e-12)) {
            fit = trial;
            lambda = std::max(lambda * 0.3, 1e-12);
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                throw NumericalError(
                    "frequency fit failed to converge (damping exhausted)");
            }
        }
    }
    if (!converged) {
        throw NumericalError("frequency fit did not converge within " +
                             std::to_string(options.max_iterations) +
                             " iterations");
    }

    // curvature-based standard error at the optimum
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, sse = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = series.points[k].time;
        const double w = 1.0 / sigma[k];
        const double r = (model_value(fit, t) -
                          series.points[k].probability_estimate) * w;
        const double d_omega =
            -(1.0 - fit.floor) * t * std::sin(2.0 * fit.omega * t) * w;
        const double s = std::sin(fit.omega * t);
        sse += r * r;
        jtj00 += d_omega * d_omega;
        if (n_params == 2) {
            jtj01 += d_omega * s * s * w;
            jtj11 += s * s * w * s * s * w;
        }
    }
    const double dof = static_cast<double>(n - static_cast<std::size_t>(n_params));
    const double scale = sse / std::max(dof, 1.0);
    double variance = 0.0;
    if (n_params == 1) {
        variance = scale / jtj00;
    } else {
        const double det = jtj00 * jtj11 - jtj01 * jtj01;
        if (det <= 0.0) {
            throw NumericalError("singular curvature at the fit optimum");
        }
        variance = scale * jtj11 / det;
    }

    CouplingEstimate estimate;
    estimate.omega_hat = std::abs(fit.omega);
    estimate.sum_alpha_sq_hat =
        estimate.omega_hat * estimate.omega_hat * (1.0 - fit.floor);
    estimate.std_error = std::sqrt(variance);
    if (options.estimate_floor) estimate.floor_hat = fit.floor;
    return estimate;
}

void annotate_per_spin_scale(CouplingEstimate& estimate, int n_spins) {
    if (n_spins < 1) {
        throw std::invalid_argument("n_spins must be at least 1");
    }
    estimate.per_spin_scale =
        estimate.omega_hat / std::sqrt(static_cast<double>(n_spins));
}

CouplingEstimate estimate_coupling_ratios(std::span<const long> counts) {
    if (counts.empty()) {
        throw std::invalid_argument("counts must not be empty");
    }
    long total = 0;
    for (long c : counts) {
        if (c < 0) throw std::invalid_argument("counts must be nonnegative");
        total += c;
    }
    if (total < 1) {
        throw std::invalid_argument(
            "all counts are zero, no ratio information");
    }
    const double n = static_cast<double>(total);
    std::vector<RatioEstimate> ratios;
    ratios.reserve(counts.size());
    for (long c : counts) {
        const double r = static_cast<double>(c) / n;
        // continuity correction keeps boundary counts at a nonzero width
        const double half_width =
            kZ95 * std::sqrt(r * (1.0 - r) / n) + 0.5 / n;
        ratios.push_back({r, half_width});
    }
    CouplingEstimate estimate;
    estimate.per_spin_ratios = std::move(ratios);
    return estimate;
}

std::vector<long> simulate_ratio_sampling(const SpinStarParams& params,
                                          long shots, RngStream& rng) {
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    const double sum_sq = sum_coupling_sq(params);
    if (sum_sq <= 0.0) {
        throw std::invalid_argument(
            "all couplings are zero, no W-like state to sample");
    }
    std::vector<double> cumulative(params.couplings.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < params.couplings.size(); ++j) {
        acc += params.couplings[j] * params.couplings[j] / sum_sq;
        cumulative[j] = acc;
    }
    cumulative.back() = 1.0;

    std::vector<long> counts(params.couplings.size(), 0);
    for (long s = 0; s < shots; ++s) {
        const double u = rng.next_uniform();
        const auto it =
            std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t j = static_cast<std::size_t>(
            std::distance(cumulative.begin(), it));
        ++counts[std::min(j, counts.size() - 1)];
    }
    return counts;
}

// --- IO -------------------------------------------------------------------------

void write_series_csv(std::ostream& out, const ProbabilitySeries& series) {
    out << "t,p_hat,shots\n";
    out << std::setprecision(17);
    for (const ProbabilityPoint& point : series.points) {
        out << point.time << ',' << point.probability_estimate << ','
            << point.shots << '\n';
    }
}

ProbabilitySeries read_series_csv(std::istream& in) {
    ProbabilitySeries series;
    std::string line;
    bool header_seen = false;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            std::string stripped = line;
            stripped.erase(
                std::remove_if(stripped.begin(), stripped.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                stripped.end());
            if (stripped != "t,p_hat,shots") {
                throw std::invalid_argument(
                    "series CSV must start with header 't,p_hat,shots'");
            }
            header_seen = true;
            continue;
        }
        std::istringstream fields(line);
        ProbabilityPoint point;
        char comma1 = 0, comma2 = 0;
        if (!(fields >> point.time >> comma1 >> point.probability_estimate >>
              comma2 >> point.shots) ||
            comma1 != ',' || comma2 != ',') {
            throw std::invalid_argument("malformed series row at line " +
                                        std::to_string(line_number));
        }
        series.points.push_back(point);
    }
    if (!header_seen) {
        throw std::invalid_argument("series CSV is empty");
    }
    validate_series(series);
    return series;
}

ProbabilitySeries load_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open series file: " + path);
    }
    return read_series_csv(in);
}

std::string estimate_to_json(const CouplingEstimate& estimate) {
    nlohmann::json doc;
    doc["omega_hat"] = estimate.omega_hat;
    doc["sum_alpha_sq_hat"] = estimate.sum_alpha_sq_hat;
    doc["stderr"] = estimate.std_error;
    if (estimate.floor_hat) doc["floor_hat"] = *estimate.floor_hat;
    if (estimate.per_spin_scale) {
        doc["per_spin_scale_order_of_magnitude"] = *estimate.per_spin_scale;
    }
    nlohmann::json ratios = nlohmann::json::array();
    if (estimate.per_spin_ratios) {
        for (const RatioEstimate& r : *estimate.per_spin_ratios) {
            ratios.push_back(
                {{"estimate", r.estimate}, {"half_width", r.half_width}});
        }
    }
    doc["ratios"] = std::move(ratios);
    return doc.dump();
}

} // namespace spinstar
