#include "spinstar/evolution.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace spinstar {

namespace {

constexpr std::complex<double> kImag{0.0, 1.0};

void check_state_matches_basis(const SectorState& state) {
    if (!state.basis) {
        throw std::invalid_argument("sector state has no basis");
    }
    if (state.amplitudes.size() !=
        static_cast<Eigen::Index>(state.basis->size())) {
        throw std::invalid_argument(
            "amplitude vector length " +
            std::to_string(state.amplitudes.size()) +
            " does not match basis size " +
            std::to_string(state.basis->size()));
    }
}

void check_params_match_basis(const SpinStarParams& params,
                              const SectorBasis& basis) {
    if (params.n_spins != basis.n_spins()) {
        throw std::invalid_argument(
            "params are for N = " + std::to_string(params.n_spins) +
            " but the state lives in an N = " +
            std::to_string(basis.n_spins()) + " sector");
    }
}

Eigen::VectorXcd propagate(const Eigen::VectorXd& eigenvalues,
                           const Eigen::MatrixXcd& eigenvectors,
                           const Eigen::VectorXcd& amplitudes, double t) {
    Eigen::VectorXcd modal = eigenvectors.adjoint() * amplitudes;
    for (Eigen::Index k = 0; k < modal.size(); ++k) {
        modal[k] *= std::exp(-kImag * eigenvalues[k] * t);
    }
    return eigenvectors * modal;
}

} // namespace

std::shared_ptr<const SectorBasis> make_sector_basis(int n_spins,
                                                     int excitation_p) {
    return std::make_shared<const SectorBasis>(
        enumerate_sector(n_spins, excitation_p));
}

SectorState sector_basis_state(std::shared_ptr<const SectorBasis> basis,
                               const BasisElement& element) {
    SectorState state;
    state.amplitudes = Eigen::VectorXcd::Zero(
        static_cast<Eigen::Index>(basis->size()));
    state.amplitudes[static_cast<Eigen::Index>(basis->rank_of(element))] = 1.0;
    state.basis = std::move(basis);
    return state;
}

SectorState initial_central_up_state(const SpinStarParams& params) {
    return sector_basis_state(make_sector_basis(params.n_spins, 0),
                              BasisElement{true, {}});
}

SectorHamiltonian build_sector_hamiltonian(const SpinStarParams& params,
                                           int excitation_p) {
    auto basis = make_sector_basis(params.n_spins, excitation_p);
    if (basis->size() > kMaxDenseDimension) {
        throw std::invalid_argument(
            "sector dimension " + std::to_string(basis->size()) +
            " exceeds the dense limit " + std::to_string(kMaxDenseDimension));
    }
    const Eigen::Index dim = static_cast<Eigen::Index>(basis->size());
    Eigen::MatrixXcd matrix = Eigen::MatrixXcd::Zero(dim, dim);

    for (std::size_t rank = 0; rank < basis->size(); ++rank) {
        const BasisElement& el = basis->element(rank);
        const Eigen::Index row = static_cast<Eigen::Index>(rank);
        matrix(row, row) = el.central_up ? params.detuning : -params.detuning;
        if (el.central_up) continue;
        // couple b_{T} to a_{T \ r} with strength alpha_r
        for (int r : el.up_set) {
            const BasisElement partner{true, remove_index(el.up_set, r)};
            const Eigen::Index col =
                static_cast<Eigen::Index>(basis->rank_of(partner));
            matrix(row, col) += params.coupling(r);
            matrix(col, row) += params.coupling(r);
        }
    }
    return SectorHamiltonian{std::move(basis), std::move(matrix)};
}

SectorEvolver::SectorEvolver(const SpinStarParams& params, int excitation_p) {
    SectorHamiltonian ham = build_sector_hamiltonian(params, excitation_p);
    basis_ = std::move(ham.basis);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(ham.matrix);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("sector eigendecomposition failed");
    }
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
}

Eigen::VectorXcd SectorEvolver::evolve(const Eigen::VectorXcd& amplitudes,
                                       double t) const {
    if (amplitudes.size() != static_cast<Eigen::Index>(basis_->size())) {
        throw std::invalid_argument("amplitude vector length " +
                                    std::to_string(amplitudes.size()) +
                                    " does not match sector dimension " +
                                    std::to_string(basis_->size()));
    }
    if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
    return propagate(eigenvalues_, eigenvectors_, amplitudes, t);
}

SectorState SectorEvolver::evolve(const SectorState& initial, double t) const {
    check_state_matches_basis(initial);
    if (initial.basis->n_spins() != basis_->n_spins() ||
        initial.basis->excitation_p() != basis_->excitation_p()) {
        throw std::invalid_argument("state belongs to a different sector");
    }
    SectorState out;
    out.basis = basis_;
    out.amplitudes = evolve(initial.amplitudes, t);
    return out;
}

SectorState evolve_sector(const SpinStarParams& params,
                          const SectorState& initial, double t) {
    check_state_matches_basis(initial);
    check_params_match_basis(params, *initial.basis);
    SectorEvolver evolver(params, initial.basis->excitation_p());
    return evolver.evolve(initial, t);
}

// --- full space ---------------------------------------------------------------

std::size_t full_dimension(int n_spins) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be at least 1");
    return std::size_t{1} << (n_spins + 1);
}

std::size_t full_basis_index(bool central_up, const std::vector<int>& up_set,
                             int n_spins) {
    std::size_t index = central_up ? (std::size_t{1} << n_spins) : 0;
    for (int j : up_set) {
        if (j < 1 || j > n_spins) {
            throw std::invalid_argument("spin index out of range");
        }
        index |= std::size_t{1} << (j - 1);
    }
    return index;
}

Eigen::MatrixXcd build_full_hamiltonian(const SpinStarParams& params) {
    if (params.n_spins > kMaxFullSpaceSpins) {
        throw std::invalid_argument(
            "full-space evolution is limited to N <= " +
            std::to_string(kMaxFullSpaceSpins) + " bath spins, got N = " +
            std::to_string(params.n_spins));
    }
    const int n = params.n_spins;
    const std::size_t dim = full_dimension(n);
    const std::size_t central_bit = std::size_t{1} << n;
    Eigen::MatrixXcd matrix = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));

    for (std::size_t idx = 0; idx < dim; ++idx) {
        const bool central_up = (idx & central_bit) != 0;
        const Eigen::Index row = static_cast<Eigen::Index>(idx);
        matrix(row, row) = central_up ? params.detuning : -params.detuning;
        if (!central_up) continue;
        // exchange: |up_A, down_j> <-> |down_A, up_j>
        for (int j = 1; j <= n; ++j) {
            const std::size_t bath_bit = std::size_t{1} << (j - 1);
            if (idx & bath_bit) continue;
            const std::size_t partner = (idx ^ central_bit) | bath_bit;
            const Eigen::Index col = static_cast<Eigen::Index>(partner);
            matrix(row, col) = params.coupling(j);
            matrix(col, row) = params.coupling(j);
        }
    }
    return matrix;
}

FullSpaceEvolver::FullSpaceEvolver(const SpinStarParams& params) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        build_full_hamiltonian(params));
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("full-space eigendecomposition failed");
    }
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
}

Eigen::VectorXcd FullSpaceEvolver::evolve(const Eigen::VectorXcd& state,
                                          double t) const {
    if (state.size() != eigenvalues_.size()) {
        throw std::invalid_argument("state dimension " +
                                    std::to_string(state.size()) +
                                    " does not match the full space");
    }
    if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
    return propagate(eigenvalues_, eigenvectors_, state, t);
}

Eigen::VectorXcd evolve_full(const SpinStarParams& params,
                             const Eigen::VectorXcd& state, double t) {
    if (state.size() !=
        static_cast<Eigen::Index>(full_dimension(params.n_spins))) {
        throw std::invalid_argument("state dimension does not match 2^(N+1)");
    }
    FullSpaceEvolver evolver(params);
    return evolver.evolve(state, t);
}

Eigen::VectorXcd embed_in_full(const SectorState& state) {
    check_state_matches_basis(state);
    const int n = state.basis->n_spins();
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(
        static_cast<Eigen::Index>(full_dimension(n)));
    for (std::size_t rank = 0; rank < state.basis->size(); ++rank) {
        const BasisElement& el = state.basis->element(rank);
        full[static_cast<Eigen::Index>(
            full_basis_index(el.central_up, el.up_set, n))] =
            state.amplitudes[static_cast<Eigen::Index>(rank)];
    }
    return full;
}

SectorState project_full_onto_sector(
    const Eigen::VectorXcd& full_state,
    std::shared_ptr<const SectorBasis> basis) {
    const int n = basis->n_spins();
    if (full_state.size() != static_cast<Eigen::Index>(full_dimension(n))) {
        throw std::invalid_argument("state dimension does not match 2^(N+1)");
    }
    SectorState state;
    state.amplitudes = Eigen::VectorXcd(static_cast<Eigen::Index>(basis->size()));
    for (std::size_t rank = 0; rank < basis->size(); ++rank) {
        const BasisElement& el = basis->element(rank);
        state.amplitudes[static_cast<Eigen::Index>(rank)] = full_state
            [static_cast<Eigen::Index>(full_basis_index(el.central_up,
                                                        el.up_set, n))];
    }
    state.basis = std::move(basis);
    return state;
}

// --- observables ----------------------------------------------------------------

namespace {

// Diagonal of J^2 on a bath configuration with m of N spins up:
// 3N/4 from sum_i s_i^2, plus the Ising part of 2 sum_{i<k} s_i . s_k.
double j2_diagonal(int n, int m) {
    const double same = 0.5 * (m * (m - 1.0) + (n - m) * (n - m - 1.0));
    const double opposite = static_cast<double>(m) * (n - m);
    return 0.75 * n + 0.5 * (same - opposite);
}

} // namespace

double expectation_sz(const SectorState& state) {
    check_state_matches_basis(state);
    const int n = state.basis->n_spins();
    double total = 0.0;
    for (std::size_t rank = 0; rank < state.basis->size(); ++rank) {
        const BasisElement& el = state.basis->element(rank);
        const double weight =
            std::norm(state.amplitudes[static_cast<Eigen::Index>(rank)]);
        const double m = static_cast<double>(el.up_set.size());
        total += weight * ((el.central_up ? 0.5 : -0.5) + m - 0.5 * n);
    }
    return total;
}

double expectation_jz(const SectorState& state) {
    check_state_matches_basis(state);
    const int n = state.basis->n_spins();
    double total = 0.0;
    for (std::size_t rank = 0; rank < state.basis->size(); ++rank) {
        const double weight =
            std::norm(state.amplitudes[static_cast<Eigen::Index>(rank)]);
        const double m =
            static_cast<double>(state.basis->element(rank).up_set.size());
        total += weight * (m - 0.5 * n);
    }
    return total;
}

double expectation_j2(const SectorState& state) {
    check_state_matches_basis(state);
    const int n = state.basis->n_spins();
    std::complex<double> total = 0.0;
    for (std::size_t rank = 0; rank < state.basis->size(); ++rank) {
        const BasisElement& el = state.basis->element(rank);
        const std::complex<double> amp =
            state.amplitudes[static_cast<Eigen::Index>(rank)];
        if (amp == 0.0) continue;
        const int m = static_cast<int>(el.up_set.size());
        total += j2_diagonal(n, m) * std::norm(amp);
        // flip-flop part: move one excitation from k (up) to i (down)
        for (int k : el.up_set) {
            const std::vector<int> without = remove_index(el.up_set, k);
            for (int i = 1; i <= n; ++i) {
                if (i == k) continue;
                if (std::binary_search(el.up_set.begin(), el.up_set.end(), i))
                    continue;
                const BasisElement target{el.central_up,
                                          add_index(without, i)};
                const std::size_t target_rank = state.basis->rank_of(target);
                total += std::conj(state.amplitudes[static_cast<Eigen::Index>(
                             target_rank)]) *
                         amp;
            }
        }
    }
    return total.real();
}

double expectation_sz(const Eigen::VectorXcd& full_state, int n_spins) {
    const std::size_t central_bit = std::size_t{1} << n_spins;
    double total = 0.0;
    for (Eigen::Index idx = 0; idx < full_state.size(); ++idx) {
        const double weight = std::norm(full_state[idx]);
        if (weight == 0.0) continue;
        const std::size_t bits = static_cast<std::size_t>(idx);
        const int m = std::popcount(bits & (central_bit - 1));
        const double central = (bits & central_bit) ? 0.5 : -0.5;
        total += weight * (central + m - 0.5 * n_spins);
    }
    return total;
}

double expectation_jz(const Eigen::VectorXcd& full_state, int n_spins) {
    const std::size_t central_bit = std::size_t{1} << n_spins;
    double total = 0.0;
    for (Eigen::Index idx = 0; idx < full_state.size(); ++idx) {
        const double weight = std::norm(full_state[idx]);
        if (weight == 0.0) continue;
        const int m = std::popcount(static_cast<std::size_t>(idx) &
                                    (central_bit - 1));
        total += weight * (m - 0.5 * n_spins);
    }
    return total;
}

double expectation_j2(const Eigen::VectorXcd& full_state, int n_spins) {
    const std::size_t central_bit = std::size_t{1} << n_spins;
    std::complex<double> total = 0.0;
    for (Eigen::Index idx = 0; idx < full_state.size(); ++idx) {
        const std::complex<double> amp = full_state[idx];
        if (amp == 0.0) continue;
        const std::size_t bits = static_cast<std::size_t>(idx);
        const int m = std::popcount(bits & (central_bit - 1));
        total += j2_diagonal(n_spins, m) * std::norm(amp);
        for (int k = 1; k <= n_spins; ++k) {
            const std::size_t k_bit = std::size_t{1} << (k - 1);
            if (!(bits & k_bit)) continue;
            for (int i = 1; i <= n_spins; ++i) {
                const std::size_t i_bit = std::size_t{1} << (i - 1);
                if (bits & i_bit) continue;
                const std::size_t target = (bits ^ k_bit) | i_bit;
                total += std::conj(
                             full_state[static_cast<Eigen::Index>(target)]) *
                         amp;
            }
        }
    }
    return total.real();
}

} // namespace spinstar
