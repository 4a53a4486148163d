#ifndef SPINSTAR_ENTANGLEMENT_HPP
#define SPINSTAR_ENTANGLEMENT_HPP

#include <Eigen/Dense>

#include "spinstar/evolution.hpp"

// Reduced two-spin density matrices and the Wootters concurrence, the
// independent check on the closed-form pair concurrence.

namespace spinstar {

// 4x4 density matrix of two selected bath spins in the basis
// {up up, up down, down up, down down}, first slot spin i, second spin j.
struct PairDensityMatrix {
    Eigen::Matrix4cd matrix;
};

// Partial trace over the central spin and every bath spin except i < j.
PairDensityMatrix reduced_pair_density(const SectorState& state, int i, int j);
PairDensityMatrix reduced_pair_density(const Eigen::VectorXcd& full_state,
                                       int n_spins, int i, int j);

// max(0, l1 - l2 - l3 - l4) with l_k the decreasing square roots of the
// eigenvalues of rho * rho_tilde, rho_tilde the spin-flipped conjugate.
// Computed through the Hermitian form sqrt(rho) rho_tilde sqrt(rho);
// eigenvalues are clipped at zero before the square roots. Throws
// NumericalError if rho fails Hermiticity/trace/positivity checks beyond
// tolerance.
double wootters_concurrence(const PairDensityMatrix& rho);

} // namespace spinstar

#endif // SPINSTAR_ENTANGLEMENT_HPP
