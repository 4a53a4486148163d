#include "spinstar/closed_form.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinstar {

namespace {
constexpr Complex kImag{0.0, 1.0};
}

Complex amplitude_a(const SpinStarParams& params, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
    const double omega = rabi_frequency(params);
    if (omega == 0.0) return 1.0; // frozen dynamics
    return std::cos(omega * t) -
           kImag * (params.detuning / omega) * std::sin(omega * t);
}

Complex amplitude_b(const SpinStarParams& params, int j, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
    const double alpha = params.coupling(j);
    const double omega = rabi_frequency(params);
    if (omega == 0.0) return 0.0;
    return -kImag * (alpha / omega) * std::sin(omega * t);
}

double success_probability(const SpinStarParams& params, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
    const double omega = rabi_frequency(params);
    if (omega == 0.0) return 0.0;
    const double s = std::sin(omega * t);
    return sum_coupling_sq(params) / (omega * omega) * s * s;
}

double survival_probability(const SpinStarParams& params, double t) {
    return std::norm(amplitude_a(params, t));
}

double optimal_time(const SpinStarParams& params, int n) {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    const double omega = rabi_frequency(params);
    if (omega == 0.0) {
        throw std::invalid_argument(
            "frozen dynamics (all couplings and detuning zero): the success "
            "probability has no maximum");
    }
    return M_PI * (2.0 * n + 1.0) / (2.0 * omega);
}

double timing_robustness(const SpinStarParams& params, int n, double x) {
    const double t_n = optimal_time(params, n);
    return success_probability(params, t_n * (1.0 + x));
}

WLikeState w_like_state(const SpinStarParams& params) {
    const double sum_sq = sum_coupling_sq(params);
    if (sum_sq <= 0.0) {
        throw std::invalid_argument(
            "all couplings are zero, no W-like state is reachable");
    }
    const double norm = std::sqrt(sum_sq);
    WLikeState state;
    state.amplitudes.reserve(params.couplings.size());
    for (double alpha : params.couplings) {
        state.amplitudes.emplace_back(alpha / norm, 0.0);
    }
    return state;
}

double pair_concurrence(const SpinStarParams& params, int i, int j,
                        double t) {
    if (i >= j) {
        throw std::invalid_argument("pair indices must satisfy i < j");
    }
    const double alpha_i = params.coupling(i);
    const double alpha_j = params.coupling(j);
    const double omega = rabi_frequency(params);
    if (omega == 0.0) return 0.0;
    const double s = std::sin(omega * t);
    return 2.0 * std::abs(alpha_i) * std::abs(alpha_j) / (omega * omega) * s *
           s;
}

double ladder_coefficient(int n_spins, int i) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be at least 1");
    if (i < 1 || i > n_spins) {
        throw std::invalid_argument("ladder step " + std::to_string(i) +
                                    " outside 1.." + std::to_string(n_spins));
    }
    const double j = n_spins / 2.0;
    const double m_from = -j + (i - 1); // J_z before the rung
    return std::sqrt(j * (j + 1.0) - m_from * (m_from + 1.0));
}

LadderStep ladder_amplitudes(int n_spins, int step_k, double alpha,
                             double t) {
    if (alpha <= 0.0) {
        throw std::invalid_argument("uniform coupling must be positive");
    }
    LadderStep step;
    step.step_index = step_k;
    step.rate_factor = ladder_coefficient(n_spins, step_k);
    const double phase = step.rate_factor * alpha * t;
    step.amp_central_up = std::cos(phase);
    step.amp_central_down = -kImag * std::sin(phase);
    return step;
}

double ladder_success_probability(int n_spins, double alpha,
                                  std::span<const double> times) {
    if (alpha <= 0.0) {
        throw std::invalid_argument("uniform coupling must be positive");
    }
    if (times.empty()) {
        throw std::invalid_argument("ladder schedule must not be empty");
    }
    if (times.size() > static_cast<std::size_t>(n_spins)) {
        throw std::invalid_argument("ladder schedule longer than n_spins");
    }
    double product = 1.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double s = std::sin(ladder_coefficient(n_spins,
                                                     static_cast<int>(i) + 1) *
                                  alpha * times[i]);
        product *= s * s;
    }
    return product;
}

double ladder_optimal_time(int n_spins, int step_i, double alpha, int n) {
    if (alpha <= 0.0) {
        throw std::invalid_argument("uniform coupling must be positive");
    }
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    return (2.0 * n + 1.0) * M_PI /
           (2.0 * alpha * ladder_coefficient(n_spins, step_i));
}

} // namespace spinstar
