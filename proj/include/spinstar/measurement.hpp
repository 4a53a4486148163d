#ifndef SPINSTAR_MEASUREMENT_HPP
#define SPINSTAR_MEASUREMENT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinstar/closed_form.hpp"
#include "spinstar/evolution.hpp"
#include "spinstar/rng.hpp"

// Projective measurement of the central spin and the conditional protocols
// built on it: single-shot W-like state preparation and the iterated
// angular-momentum ladder. Measurements are instantaneous and projective;
// the mid-ladder reset of the central spin is an ideal instantaneous
// re-preparation.

namespace spinstar {

struct MeasurementOutcome {
    int eigenvalue = 0;   // +1 or -1 of sigma_z on the central spin
    double probability = 0.0;
    SectorState collapsed; // joint state with the central spin projected
};

struct TrajectoryStep {
    double time = 0.0;
    int outcome = 0;
    double probability = 0.0;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::string rng_algorithm; // RngStream::kAlgorithm
    std::vector<TrajectoryStep> steps;
    SectorState final_state;
    bool succeeded = false; // true iff every recorded outcome is -1
};

// Samples sigma_z of the central spin with Born probabilities, consuming
// exactly one uniform from the stream. The collapsed state keeps the joint
// basis with the unmeasured block zeroed and the rest renormalized.
MeasurementOutcome measure_central(const SectorState& state, RngStream& rng);

// Deterministic projection onto one sigma_z branch of the central spin,
// with the Born probability of that branch reported. Throws
// std::invalid_argument if the branch carries no weight.
MeasurementOutcome project_central(const SectorState& state, int eigenvalue);

// Moves a central-down state of sector p to the central-up block of sector
// p+1 with the bath untouched (the ladder's reset step). Requires the input
// to have no central-up component.
SectorState reprepare_central_up(const SectorState& state);

// Evolve |up_A; all down> for measure_time, then measure the central spin
// once; the -1 branch leaves the bath in the W-like state.
class WStateProtocol {
public:
    WStateProtocol(const SpinStarParams& params, double measure_time,
                   std::uint64_t seed);

    TrajectoryRecord run(std::uint64_t trajectory_index) const;
    double predicted_success() const; // closed-form success probability

private:
    SpinStarParams params_;
    double measure_time_;
    std::uint64_t seed_;
    SectorEvolver evolver_;
    SectorState evolved_; // pre-measurement state, shared by trajectories
};

TrajectoryRecord prepare_w_like(const SpinStarParams& params,
                                double measure_time, RngStream& rng);

// k rungs of the conditional ladder with uniform coupling alpha: evolve,
// measure, and on each -1 outcome re-prepare the central spin up. A +1
// outcome marks the trajectory failed and halts it; the collapsed failure
// state is recorded, no retry is attempted.
class LadderProtocol {
public:
    LadderProtocol(int n_spins, double alpha, std::vector<double> schedule,
                   std::uint64_t seed);

    TrajectoryRecord run(std::uint64_t trajectory_index) const;
    double predicted_success() const; // prod_i sin^2(p_i alpha t_i)
    const std::vector<double>& schedule() const { return schedule_; }

private:
    int n_spins_;
    double alpha_;
    std::vector<double> schedule_;
    std::uint64_t seed_;
    std::vector<SectorState> pre_measure_; // evolved state entering rung i
};

TrajectoryRecord run_ladder(int n_spins, double alpha, int target_k,
                            std::span<const double> schedule, RngStream& rng);

// Convenience overload validating the uniform-coupling assumption of the
// ladder formulas; throws ModelAssumptionError otherwise.
TrajectoryRecord run_ladder(const SpinStarParams& params, int target_k,
                            std::span<const double> schedule, RngStream& rng);

struct LadderResult {
    std::vector<double> schedule;
    SectorState final_state;
};

// The n = 0 optimal schedule and the state it reaches with certainty: the
// symmetric Dicke state with k bath spins up (equal amplitudes over all
// C(N,k) configurations), the central spin left down after the k-th
// measurement.
LadderResult deterministic_ladder(int n_spins, double alpha, int target_k);

// |<state | dicke(n_up)>| where dicke(n_up) is the equal-amplitude symmetric
// state over all bath configurations with n_up spins up, tensored with
// whichever central-spin block of the sector holds that bath excitation.
double symmetric_dicke_fidelity(const SectorState& state, int n_up);

// |<state | down_A, W-like>| for a p = 0 sector state.
double w_like_fidelity(const SectorState& state, const WLikeState& w);

// One JSON object per trajectory: seed, rng algorithm, per-step
// (time, outcome, probability), success flag.
std::string trajectory_to_json_line(const TrajectoryRecord& record);

} // namespace spinstar

#endif // SPINSTAR_MEASUREMENT_HPP
