#ifndef SPINSTAR_ESTIMATION_HPP
#define SPINSTAR_ESTIMATION_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spinstar/params.hpp"
#include "spinstar/rng.hpp"

// Recovery of coupling information from measurement statistics: the
// collective frequency Omega (hence sum_j alpha_j^2) from survival
// oscillations, and the per-spin ratios alpha_j^2 / sum alpha_k^2 from
// which-spin-is-up counts on freshly prepared W-like states.

namespace spinstar {

struct ProbabilityPoint {
    double time = 0.0;
    double probability_estimate = 0.0;
    long shots = 0;
};

struct ProbabilitySeries {
    std::vector<ProbabilityPoint> points;
};

struct RatioEstimate {
    double estimate = 0.0;
    double half_width = 0.0; // 95% confidence, normal approximation
};

struct CouplingEstimate {
    double omega_hat = 0.0;
    double sum_alpha_sq_hat = 0.0;
    double std_error = 0.0;
    // Floor of the survival signal, Delta^2/Omega^2, when fitted.
    std::optional<double> floor_hat;
    // omega_hat / sqrt(N): the common per-spin coupling scale under the
    // same-order assumption. An order-of-magnitude figure, nothing finer.
    std::optional<double> per_spin_scale;
    std::optional<std::vector<RatioEstimate>> per_spin_ratios;
};

enum class SamplingNoise {
    binomial, // each point is a binomial frequency over `shots` repetitions
    none      // exact probabilities, shots recorded as metadata only
};

// Samples the survival probability |a(t)|^2 at the given times. Bit
// reproducible for a fixed stream.
ProbabilitySeries simulate_survival_sampling(
    const SpinStarParams& params, std::span<const double> times,
    long shots_per_point, RngStream& rng,
    SamplingNoise noise = SamplingNoise::binomial);

struct FitOptions {
    // Fit p(t) = f + (1-f) cos^2(Omega t) instead of pinning f = 0; recovers
    // Omega and Delta^2/Omega^2 for detuned series.
    bool estimate_floor = false;
    int max_iterations = 200;
    double step_tolerance = 1e-10; // relative step size
};

// Least-squares frequency recovery. Initialization: spectral peak of the
// centred signal 2 p_hat - 1 (which oscillates at 2 Omega), then
// Gauss-Newton refinement of the variance-weighted squared error. Rejects
// series with fewer than 8 points, spanning less than 1.5 coarse periods,
// or sampled too coarsely for the coarse frequency (aliasing guard).
// std_error comes from the curvature of the weighted objective at the
// optimum. Throws ModelAssumptionError on guard violations, NumericalError
// on non-convergence.
CouplingEstimate fit_collective_coupling(const ProbabilitySeries& series,
                                         const FitOptions& options = {});

// Attaches omega_hat / sqrt(n_spins) to a frequency estimate as the
// order-of-magnitude per-spin coupling scale.
void annotate_per_spin_scale(CouplingEstimate& estimate, int n_spins);

// counts_j / sum(counts) with 95% normal-approximation half-widths,
// continuity-corrected by 1/(2 sum) so boundary counts keep a nonzero
// width. Throws std::invalid_argument on all-zero counts.
CouplingEstimate estimate_coupling_ratios(std::span<const long> counts);

// Multinomial draw of `shots` which-spin-is-up detections with
// probabilities alpha_j^2 / sum alpha_k^2.
std::vector<long> simulate_ratio_sampling(const SpinStarParams& params,
                                          long shots, RngStream& rng);

// CSV with header "t,p_hat,shots"; lines starting with '#' are skipped on
// read. Read validates the series invariants and throws
// std::invalid_argument with a description on violation.
void write_series_csv(std::ostream& out, const ProbabilitySeries& series);
ProbabilitySeries read_series_csv(std::istream& in);
ProbabilitySeries load_series_file(const std::string& path);

std::string estimate_to_json(const CouplingEstimate& estimate);

} // namespace spinstar

#endif // SPINSTAR_ESTIMATION_HPP
