#ifndef SPINSTAR_CLOSED_FORM_HPP
#define SPINSTAR_CLOSED_FORM_HPP

#include <complex>
#include <span>
#include <vector>

#include "spinstar/params.hpp"

// Analytic solutions for the single-excitation dynamics of the spin star:
// the amplitudes of the state that starts as |up_A; all bath down>, the
// conditional W-like preparation quantities derived from them, the pair
// concurrence, and the uniform-coupling angular-momentum ladder factors.

namespace spinstar {

using Complex = std::complex<double>;

// Amplitude of |up_A; all down> at time t:
// cos(Omega t) - i (Delta/Omega) sin(Omega t); 1 for the frozen Omega = 0 case.
Complex amplitude_a(const SpinStarParams& params, double t);

// Amplitude of |down_A; spin j up> at time t:
// -i (alpha_j/Omega) sin(Omega t); 0 when Omega = 0. j is 1-based.
Complex amplitude_b(const SpinStarParams& params, int j, double t);

// Probability that measuring sigma_z on the central spin at time t yields -1:
// (sum_j alpha_j^2 / Omega^2) sin^2(Omega t) = sum_j |b_j(t)|^2.
double success_probability(const SpinStarParams& params, double t);

// Probability of finding the joint system still in its initial state,
// |a(t)|^2. Periodic with period pi/Omega.
double survival_probability(const SpinStarParams& params, double t);

// n-th measurement time maximizing the success probability,
// t_n = pi (2n+1) / (2 Omega). Throws std::invalid_argument when Omega = 0
// (frozen dynamics, no maximum exists).
double optimal_time(const SpinStarParams& params, int n);

// Success probability at the mistimed instant t_n (1 + x). For detuning 0
// this equals cos^2((2n+1) pi x / 2).
double timing_robustness(const SpinStarParams& params, int n, double x);

// Post-measurement bath state on the -1 outcome: one amplitude per bath
// spin, the j-th weighting |down...up_j...down>.
struct WLikeState {
    std::vector<Complex> amplitudes;
};

// amplitudes_j = alpha_j / sqrt(sum_k alpha_k^2). Throws
// std::invalid_argument when every coupling is zero.
WLikeState w_like_state(const SpinStarParams& params);

// Concurrence between bath spins i < j at time t along the single-excitation
// trajectory: 2 |alpha_i| |alpha_j| sin^2(Omega t) / Omega^2.
double pair_concurrence(const SpinStarParams& params, int i, int j, double t);

// --- uniform-coupling ladder -------------------------------------------------
// One conditional-measurement rung of the collective angular-momentum ladder
// that climbs |N/2, -N/2> -> |N/2, -N/2 + k| for uniform couplings.

struct LadderStep {
    int step_index = 0;         // i >= 1
    double rate_factor = 0.0;   // p_i
    Complex amp_central_up;     // weight of |up_A>|N/2, -N/2+i-1>
    Complex amp_central_down;   // weight of |down_A>|N/2, -N/2+i>
};

// p_i = sqrt((N/2)(N/2+1) - (-N/2+i-1)(-N/2+i)); p_1 = sqrt(N).
double ladder_coefficient(int n_spins, int i);

// Two-level amplitudes of rung step_k after evolving for time t:
// amp_central_up = cos(p_k alpha t), amp_central_down = -i sin(p_k alpha t).
LadderStep ladder_amplitudes(int n_spins, int step_k, double alpha, double t);

// Probability that k consecutive measurements all give -1 with waiting
// times `times`: prod_i sin^2(p_i alpha t_i).
double ladder_success_probability(int n_spins, double alpha,
                                  std::span<const double> times);

// Waiting time that makes rung step_i deterministic,
// (2n+1) pi / (2 alpha p_i).
double ladder_optimal_time(int n_spins, int step_i, double alpha, int n);

} // namespace spinstar

#endif // SPINSTAR_CLOSED_FORM_HPP
