#ifndef SPINSTAR_PARAMS_HPP
#define SPINSTAR_PARAMS_HPP

#include <optional>
#include <string>
#include <vector>

namespace spinstar {

// Parameters of the spin-star model: one central spin-1/2 exchange-coupled
// to n_spins mutually uncoupled spins-1/2. Natural units, hbar = 1; all
// frequencies are angular frequencies. Spin indices are 1-based everywhere
// in the public interface.
struct SpinStarParams {
    int n_spins = 0;
    std::vector<double> couplings; // alpha_j, couplings[j-1] is spin j
    double omega = 0.0;            // bath Zeeman frequency
    double omega0 = 0.0;           // central-spin Zeeman frequency
    double detuning = 0.0;         // omega - omega0

    double coupling(int j) const;  // 1-based, range-checked
};

// Validates and assembles the parameter set. detuning = omega - omega0.
// Throws std::invalid_argument on length mismatch or non-finite input.
SpinStarParams make_params(int n_spins, std::vector<double> couplings,
                           double omega, double omega0);

// Collective oscillation frequency sqrt(sum_j alpha_j^2 + detuning^2).
double rabi_frequency(const SpinStarParams& params);

double sum_coupling_sq(const SpinStarParams& params);

// The common coupling value if all couplings are equal, nullopt otherwise.
std::optional<double> uniform_coupling(const SpinStarParams& params);

// Energy in eV -> angular frequency in rad/s (divides by CODATA hbar).
double ev_to_angular_frequency(double energy_ev);

// Parses {"n_spins": int, "couplings": [float...], "omega": float,
// "omega0": float}. Throws std::invalid_argument with a description of the
// schema violation.
SpinStarParams params_from_json(const std::string& json_text);
SpinStarParams load_params_file(const std::string& path);

} // namespace spinstar

#endif // SPINSTAR_PARAMS_HPP
