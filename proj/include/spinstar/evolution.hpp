#ifndef SPINSTAR_EVOLUTION_HPP
#define SPINSTAR_EVOLUTION_HPP

#include <Eigen/Dense>
#include <memory>

#include "spinstar/basis.hpp"
#include "spinstar/params.hpp"

// Numerical evolution restricted to one conserved-S_z sector, plus a
// brute-force evolver on the unrestricted 2^(N+1)-dimensional space.
//
// Frame convention: the Zeeman terms are constant within every sector and
// contribute only a sector-global phase, which is dropped. What remains is
// the detuning on the central spin plus the exchange couplings, so the
// sector matrix has +Delta on the central-up block, -Delta on the
// central-down block, and alpha_r connecting configurations that differ by
// moving one excitation between the central spin and bath spin r. The full
// Hamiltonian below uses the same frame, so sector and full evolution agree
// amplitude by amplitude, not merely up to phases.

namespace spinstar {

// Maximum dense sector dimension; larger requests are rejected rather than
// silently sparsified.
inline constexpr std::size_t kMaxDenseDimension = 5000;

// Largest bath size accepted by the full-space evolver (dimension 2^(N+1)).
inline constexpr int kMaxFullSpaceSpins = 12;

struct SectorState {
    std::shared_ptr<const SectorBasis> basis;
    Eigen::VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }
};

struct SectorHamiltonian {
    std::shared_ptr<const SectorBasis> basis;
    Eigen::MatrixXcd matrix;
};

std::shared_ptr<const SectorBasis> make_sector_basis(int n_spins,
                                                     int excitation_p);

// Unit amplitude on one configuration of the given sector basis.
SectorState sector_basis_state(std::shared_ptr<const SectorBasis> basis,
                               const BasisElement& element);

// |up_A; all bath down>, the p = 0 starting state of the protocols.
SectorState initial_central_up_state(const SpinStarParams& params);

SectorHamiltonian build_sector_hamiltonian(const SpinStarParams& params,
                                           int excitation_p);

// Caches the Hermitian eigendecomposition of one sector Hamiltonian so that
// many times (or many trajectories) reuse it. Immutable after construction;
// safe to share across threads.
class SectorEvolver {
public:
    SectorEvolver(const SpinStarParams& params, int excitation_p);

    const SectorBasis& basis() const { return *basis_; }
    std::shared_ptr<const SectorBasis> basis_ptr() const { return basis_; }

    SectorState evolve(const SectorState& initial, double t) const;
    Eigen::VectorXcd evolve(const Eigen::VectorXcd& amplitudes,
                            double t) const;

private:
    std::shared_ptr<const SectorBasis> basis_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXcd eigenvectors_;
};

// One-shot wrapper around SectorEvolver.
SectorState evolve_sector(const SpinStarParams& params,
                          const SectorState& initial, double t);

// --- full 2^(N+1)-dimensional space ------------------------------------------
// Basis index convention: bit j-1 of the low N bits is bath spin j
// (1 = up), bit N is the central spin.

std::size_t full_dimension(int n_spins);
std::size_t full_basis_index(bool central_up, const std::vector<int>& up_set,
                             int n_spins);

Eigen::MatrixXcd build_full_hamiltonian(const SpinStarParams& params);

class FullSpaceEvolver {
public:
    explicit FullSpaceEvolver(const SpinStarParams& params);

    Eigen::VectorXcd evolve(const Eigen::VectorXcd& state, double t) const;

private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXcd eigenvectors_;
};

// Evolution under the complete Hamiltonian on the unrestricted space.
// Guarded at kMaxFullSpaceSpins bath spins.
Eigen::VectorXcd evolve_full(const SpinStarParams& params,
                             const Eigen::VectorXcd& state, double t);

// Embedding of a sector state into the full space and the matching
// projection back; projection keeps the components lying in the sector.
Eigen::VectorXcd embed_in_full(const SectorState& state);
SectorState project_full_onto_sector(const Eigen::VectorXcd& full_state,
                                     std::shared_ptr<const SectorBasis> basis);

// --- collective observables ---------------------------------------------------
// expectation_sz includes the central spin; expectation_j2/expectation_jz
// act on the N bath spins only.

double expectation_sz(const SectorState& state);
double expectation_jz(const SectorState& state);
double expectation_j2(const SectorState& state);

double expectation_sz(const Eigen::VectorXcd& full_state, int n_spins);
double expectation_jz(const Eigen::VectorXcd& full_state, int n_spins);
double expectation_j2(const Eigen::VectorXcd& full_state, int n_spins);

} // namespace spinstar

#endif // SPINSTAR_EVOLUTION_HPP
