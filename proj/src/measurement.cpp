#include "spinstar/measurement.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "spinstar/errors.hpp"

namespace spinstar {

namespace {

// Probability of finding the central spin up, from the central-up block.
double central_up_weight(const SectorState& state) {
    const std::size_t split = state.basis->central_down_offset();
    double weight = 0.0;
    for (std::size_t rank = 0; rank < split; ++rank) {
        weight += std::norm(state.amplitudes[static_cast<Eigen::Index>(rank)]);
    }
    return weight;
}

SectorState collapse_to_block(const SectorState& state, bool central_up,
                              double block_weight) {
    SectorState collapsed;
    collapsed.basis = state.basis;
    collapsed.amplitudes =
        Eigen::VectorXcd::Zero(state.amplitudes.size());
    const std::size_t split = state.basis->central_down_offset();
    const std::size_t begin = central_up ? 0 : split;
    const std::size_t end = central_up ? split : state.basis->size();
    const double scale = 1.0 / std::sqrt(block_weight);
    for (std::size_t rank = begin; rank < end; ++rank) {
        collapsed.amplitudes[static_cast<Eigen::Index>(rank)] =
            state.amplitudes[static_cast<Eigen::Index>(rank)] * scale;
    }
    return collapsed;
}

} // namespace

MeasurementOutcome measure_central(const SectorState& state, RngStream& rng) {
    if (!state.basis) {
        throw std::invalid_argument("sector state has no basis");
    }
    const double total = state.amplitudes.squaredNorm();
    if (total <= 0.0) {
        throw std::invalid_argument("cannot measure the zero state");
    }
    const double p_up = central_up_weight(state) / total;
    const double p_down = 1.0 - p_up;

    const double u = rng.next_uniform();
    const bool central_up = u < p_up;
    const double probability = central_up ? p_up : p_down;
    if (probability <= 0.0) {
        throw std::logic_error("sampled a zero-probability branch");
    }
    MeasurementOutcome outcome;
    outcome.eigenvalue = central_up ? +1 : -1;
    outcome.probability = probability;
    outcome.collapsed =
        collapse_to_block(state, central_up, probability * total);
    return outcome;
}

MeasurementOutcome project_central(const SectorState& state, int eigenvalue) {
    if (eigenvalue != +1 && eigenvalue != -1) {
        throw std::invalid_argument("eigenvalue must be +1 or -1");
    }
    if (!state.basis) {
        throw std::invalid_argument("sector state has no basis");
    }
    const double total = state.amplitudes.squaredNorm();
    if (total <= 0.0) {
        throw std::invalid_argument("cannot project the zero state");
    }
    const double p_up = central_up_weight(state) / total;
    const bool central_up = eigenvalue == +1;
    const double probability = central_up ? p_up : 1.0 - p_up;
    if (probability <= 0.0) {
        throw std::invalid_argument("requested branch carries no weight");
    }
    MeasurementOutcome outcome;
    outcome.eigenvalue = eigenvalue;
    outcome.probability = probability;
    outcome.collapsed =
        collapse_to_block(state, central_up, probability * total);
    return outcome;
}

SectorState reprepare_central_up(const SectorState& state) {
    if (!state.basis) {
        throw std::invalid_argument("sector state has no basis");
    }
    if (central_up_weight(state) > 1e-20 * state.amplitudes.squaredNorm()) {
        throw std::invalid_argument(
            "reset requires the central spin measured down");
    }
    const SectorBasis& from = *state.basis;
    auto to = make_sector_basis(from.n_spins(), from.excitation_p() + 1);
    // the central-down block of sector p and the central-up block of sector
    // p+1 enumerate the same up-sets in the same lexicographic order
    SectorState reset;
    reset.amplitudes =
        Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to->size()));
    const std::size_t count = from.size() - from.central_down_offset();
    for (std::size_t i = 0; i < count; ++i) {
        reset.amplitudes[static_cast<Eigen::Index>(i)] = state.amplitudes
            [static_cast<Eigen::Index>(from.central_down_offset() + i)];
    }
    reset.basis = std::move(to);
    return reset;
}

// --- W-like preparation --------------------------------------------------------

namespace {

TrajectoryRecord single_measurement_trajectory(const SectorState& evolved,
                                               double measure_time,
                                               RngStream& rng) {
    TrajectoryRecord record;
    record.seed = rng.state();
    record.rng_algorithm = RngStream::kAlgorithm;
    MeasurementOutcome outcome = measure_central(evolved, rng);
    record.steps.push_back(
        {measure_time, outcome.eigenvalue, outcome.probability});
    record.succeeded = outcome.eigenvalue == -1;
    record.final_state = std::move(outcome.collapsed);
    return record;
}

} // namespace

WStateProtocol::WStateProtocol(const SpinStarParams& params,
                               double measure_time, std::uint64_t seed)
    : params_(params),
      measure_time_(measure_time),
      seed_(seed),
      evolver_(params, 0) {
    if (sum_coupling_sq(params) <= 0.0) {
        throw std::invalid_argument(
            "all couplings are zero, the conditional preparation cannot "
            "succeed");
    }
    evolved_ = evolver_.evolve(initial_central_up_state(params), measure_time);
}

TrajectoryRecord WStateProtocol::run(std::uint64_t trajectory_index) const {
    RngStream rng(seed_, trajectory_index);
    return single_measurement_trajectory(evolved_, measure_time_, rng);
}

double WStateProtocol::predicted_success() const {
    return success_probability(params_, measure_time_);
}

TrajectoryRecord prepare_w_like(const SpinStarParams& params,
                                double measure_time, RngStream& rng) {
    if (sum_coupling_sq(params) <= 0.0) {
        throw std::invalid_argument(
            "all couplings are zero, the conditional preparation cannot "
            "succeed");
    }
    SectorEvolver evolver(params, 0);
    SectorState evolved =
        evolver.evolve(initial_central_up_state(params), measure_time);
    return single_measurement_trajectory(evolved, measure_time, rng);
}

// --- ladder ---------------------------------------------------------------------

namespace {

struct LadderChain {
    // state entering measurement i along the all-(-1) branch
    std::vector<SectorState> pre_measure;
};

LadderChain build_ladder_chain(int n_spins, double alpha,
                               std::span<const double> schedule) {
    if (alpha <= 0.0) {
        throw std::invalid_argument("uniform coupling must be positive");
    }
    if (schedule.empty()) {
        throw std::invalid_argument("ladder schedule must not be empty");
    }
    if (schedule.size() > static_cast<std::size_t>(n_spins)) {
        throw std::invalid_argument("ladder schedule longer than n_spins");
    }
    const SpinStarParams params = make_params(
        n_spins, std::vector<double>(static_cast<std::size_t>(n_spins), alpha),
        0.0, 0.0);

    LadderChain chain;
    chain.pre_measure.reserve(schedule.size());
    SectorState entering = initial_central_up_state(params);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const SectorEvolver evolver(params, static_cast<int>(i));
        chain.pre_measure.push_back(evolver.evolve(entering, schedule[i]));
        if (i + 1 < schedule.size()) {
            // continue along the success branch: collapse to -1 and reset
            const SectorState& evolved = chain.pre_measure.back();
            const double p_up = central_up_weight(evolved);
            SectorState collapsed =
                collapse_to_block(evolved, false, 1.0 - p_up);
            entering = reprepare_central_up(collapsed);
        }
    }
    return chain;
}

TrajectoryRecord run_ladder_trajectory(
    std::span<const SectorState> pre_measure,
    std::span<const double> schedule, RngStream& rng) {
    TrajectoryRecord record;
    record.seed = rng.state();
    record.rng_algorithm = RngStream::kAlgorithm;
    record.succeeded = true;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        MeasurementOutcome outcome = measure_central(pre_measure[i], rng);
        record.steps.push_back(
            {schedule[i], outcome.eigenvalue, outcome.probability});
        record.final_state = std::move(outcome.collapsed);
        if (outcome.eigenvalue == +1) {
            record.succeeded = false;
            break;
        }
    }
    return record;
}

} // namespace

LadderProtocol::LadderProtocol(int n_spins, double alpha,
                               std::vector<double> schedule,
                               std::uint64_t seed)
    : n_spins_(n_spins),
      alpha_(alpha),
      schedule_(std::move(schedule)),
      seed_(seed) {
    LadderChain chain = build_ladder_chain(n_spins_, alpha_, schedule_);
    pre_measure_ = std::move(chain.pre_measure);
}

TrajectoryRecord LadderProtocol::run(std::uint64_t trajectory_index) const {
    RngStream rng(seed_, trajectory_index);
    return run_ladder_trajectory(pre_measure_, schedule_, rng);
}

double LadderProtocol::predicted_success() const {
    return ladder_success_probability(n_spins_, alpha_, schedule_);
}

TrajectoryRecord run_ladder(int n_spins, double alpha, int target_k,
                            std::span<const double> schedule, RngStream& rng) {
    if (static_cast<std::size_t>(target_k) != schedule.size()) {
        throw std::invalid_argument(
            "schedule length must equal the target rung count");
    }
    LadderChain chain = build_ladder_chain(n_spins, alpha, schedule);
    return run_ladder_trajectory(chain.pre_measure, schedule, rng);
}

TrajectoryRecord run_ladder(const SpinStarParams& params, int target_k,
                            std::span<const double> schedule, RngStream& rng) {
    const auto alpha = uniform_coupling(params);
    if (!alpha) {
        throw ModelAssumptionError(
            "the ladder protocol requires a uniform coupling alpha_j == "
            "alpha for every j");
    }
    if (params.detuning != 0.0) {
        throw ModelAssumptionError(
            "the ladder analysis assumes zero detuning (omega == omega0)");
    }
    return run_ladder(params.n_spins, *alpha, target_k, schedule, rng);
}

LadderResult deterministic_ladder(int n_spins, double alpha, int target_k) {
    if (target_k < 1 || target_k > n_spins) {
        throw std::invalid_argument("target rung must satisfy 1 <= k <= N");
    }
    std::vector<double> schedule;
    schedule.reserve(static_cast<std::size_t>(target_k));
    for (int i = 1; i <= target_k; ++i) {
        schedule.push_back(ladder_optimal_time(n_spins, i, alpha, 0));
    }
    LadderChain chain = build_ladder_chain(n_spins, alpha, schedule);
    // at the optimal times every -1 branch has unit probability
    const SectorState& last = chain.pre_measure.back();
    const double p_up = central_up_weight(last);
    LadderResult result;
    result.schedule = std::move(schedule);
    result.final_state = collapse_to_block(last, false, 1.0 - p_up);
    return result;
}

double symmetric_dicke_fidelity(const SectorState& state, int n_up) {
    if (!state.basis) {
        throw std::invalid_argument("sector state has no basis");
    }
    const SectorBasis& basis = *state.basis;
    const double amplitude =
        1.0 / std::sqrt(static_cast<double>(binomial(basis.n_spins(), n_up)));
    std::complex<double> overlap = 0.0;
    for (std::size_t rank = 0; rank < basis.size(); ++rank) {
        if (static_cast<int>(basis.element(rank).up_set.size()) != n_up)
            continue;
        overlap +=
            amplitude * state.amplitudes[static_cast<Eigen::Index>(rank)];
    }
    return std::abs(overlap);
}

double w_like_fidelity(const SectorState& state, const WLikeState& w) {
    if (!state.basis || state.basis->excitation_p() != 0) {
        throw std::invalid_argument(
            "W-like fidelity is defined for p = 0 sector states");
    }
    const SectorBasis& basis = *state.basis;
    if (w.amplitudes.size() != static_cast<std::size_t>(basis.n_spins())) {
        throw std::invalid_argument("W-like amplitude count mismatch");
    }
    std::complex<double> overlap = 0.0;
    const std::size_t offset = basis.central_down_offset();
    for (std::size_t j = 0; j < w.amplitudes.size(); ++j) {
        overlap += std::conj(w.amplitudes[j]) *
                   state.amplitudes[static_cast<Eigen::Index>(offset + j)];
    }
    return std::abs(overlap);
}

std::string trajectory_to_json_line(const TrajectoryRecord& record) {
    nlohmann::json doc;
    doc["seed"] = record.seed;
    doc["rng"] = record.rng_algorithm;
    nlohmann::json steps = nlohmann::json::array();
    for (const TrajectoryStep& step : record.steps) {
        steps.push_back({{"time", step.time},
                         {"outcome", step.outcome},
                         {"probability", step.probability}});
    }
    doc["steps"] = std::move(steps);
    doc["succeeded"] = record.succeeded;
    return doc.dump();
}

} // namespace spinstar
