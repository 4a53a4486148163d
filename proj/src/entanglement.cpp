#include "spinstar/entanglement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinstar/errors.hpp"

namespace spinstar {

namespace {

void check_pair_indices(int n_spins, int i, int j) {
    if (i < 1 || j < 1 || i > n_spins || j > n_spins) {
        throw std::invalid_argument("pair indices outside 1..N");
    }
    if (i >= j) {
        throw std::invalid_argument("pair indices must satisfy i < j");
    }
}

// Row of the two-spin basis {uu, ud, du, dd} for the kept pair (i first).
int pair_slot(bool i_up, bool j_up) {
    return (i_up ? 0 : 2) + (j_up ? 0 : 1);
}

} // namespace

PairDensityMatrix reduced_pair_density(const SectorState& state, int i,
                                       int j) {
    if (!state.basis) {
        throw std::invalid_argument("sector state has no basis");
    }
    check_pair_indices(state.basis->n_spins(), i, j);

    // group amplitudes by the traced-out configuration (central spin plus
    // the remaining bath spins); each group contributes v v^dagger
    std::map<std::pair<bool, std::vector<int>>, Eigen::Vector4cd> groups;
    for (std::size_t rank = 0; rank < state.basis->size(); ++rank) {
        const std::complex<double> amp =
            state.amplitudes[static_cast<Eigen::Index>(rank)];
        if (amp == 0.0) continue;
        const BasisElement& el = state.basis->element(rank);
        const bool i_up =
            std::binary_search(el.up_set.begin(), el.up_set.end(), i);
        const bool j_up =
            std::binary_search(el.up_set.begin(), el.up_set.end(), j);
        std::vector<int> environment;
        environment.reserve(el.up_set.size());
        for (int s : el.up_set) {
            if (s != i && s != j) environment.push_back(s);
        }
        auto key = std::make_pair(el.central_up, std::move(environment));
        auto [it, inserted] =
            groups.try_emplace(std::move(key), Eigen::Vector4cd::Zero());
        it->second[pair_slot(i_up, j_up)] += amp;
    }
    PairDensityMatrix rho;
    rho.matrix.setZero();
    for (const auto& [key, v] : groups) {
        rho.matrix += v * v.adjoint();
    }
    return rho;
}

PairDensityMatrix reduced_pair_density(const Eigen::VectorXcd& full_state,
                                       int n_spins, int i, int j) {
    check_pair_indices(n_spins, i, j);
    if (full_state.size() !=
        static_cast<Eigen::Index>(full_dimension(n_spins))) {
        throw std::invalid_argument("state dimension does not match 2^(N+1)");
    }
    const std::size_t i_bit = std::size_t{1} << (i - 1);
    const std::size_t j_bit = std::size_t{1} << (j - 1);
    PairDensityMatrix rho;
    rho.matrix.setZero();
    const std::size_t dim = static_cast<std::size_t>(full_state.size());
    for (std::size_t env = 0; env < dim; ++env) {
        if (env & (i_bit | j_bit)) continue;
        Eigen::Vector4cd v;
        for (int slot = 0; slot < 4; ++slot) {
            const bool i_up = slot < 2;
            const bool j_up = (slot % 2) == 0;
            const std::size_t idx =
                env | (i_up ? i_bit : 0) | (j_up ? j_bit : 0);
            v[slot] = full_state[static_cast<Eigen::Index>(idx)];
        }
        rho.matrix += v * v.adjoint();
    }
    return rho;
}

double wootters_concurrence(const PairDensityMatrix& rho) {
    const Eigen::Matrix4cd& m = rho.matrix;
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw NumericalError("density matrix is not Hermitian");
    }
    if (std::abs(m.trace().real() - 1.0) > 1e-8 ||
        std::abs(m.trace().imag()) > 1e-10) {
        throw NumericalError("density matrix trace differs from 1");
    }
    const Eigen::Matrix4cd herm = 0.5 * (m + m.adjoint());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> rho_solver(herm);
    Eigen::Vector4d evals = rho_solver.eigenvalues();
    if (evals.minCoeff() < -1e-9) {
        throw NumericalError("density matrix is not positive semidefinite");
    }
    // numerical negatives must not poison the square roots
    Eigen::Vector4d sqrt_evals;
    for (int k = 0; k < 4; ++k) {
        sqrt_evals[k] = std::sqrt(std::max(evals[k], 0.0));
    }
    const Eigen::Matrix4cd sqrt_rho = rho_solver.eigenvectors() *
                                      sqrt_evals.asDiagonal() *
                                      rho_solver.eigenvectors().adjoint();

    // spin flip: conjugation with the antidiagonal {-1, +1, +1, -1}
    Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
    flip(0, 3) = -1.0;
    flip(1, 2) = 1.0;
    flip(2, 1) = 1.0;
    flip(3, 0) = -1.0;
    const Eigen::Matrix4cd rho_tilde = flip * herm.conjugate() * flip;

    // eigenvalues of rho * rho_tilde through the Hermitian equivalent
    Eigen::Matrix4cd product = sqrt_rho * rho_tilde * sqrt_rho;
    product = 0.5 * (product + product.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> prod_solver(product);
    // eigenvalues within rounding noise of zero would inject sqrt(eps)-size
    // spurious lambdas into the difference below
    const double floor =
        1e-12 * std::max(prod_solver.eigenvalues().maxCoeff(), 0.0);
    std::array<double, 4> lambdas;
    for (int k = 0; k < 4; ++k) {
        const double value = prod_solver.eigenvalues()[k];
        lambdas[static_cast<std::size_t>(k)] =
            value > floor ? std::sqrt(value) : 0.0;
    }
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    return std::max(0.0, lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]);
}

} // namespace spinstar
