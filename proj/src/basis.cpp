#include "spinstar/basis.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace spinstar {

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // stays integral at every step: result holds C(n-k+i-1, i-1) * ...
        result = result * static_cast<std::uint64_t>(n - k + i) /
                 static_cast<std::uint64_t>(i);
    }
    return result;
}

SectorBasis::SectorBasis(int n_spins, int excitation_p,
                         std::vector<BasisElement> elements,
                         std::size_t central_up_count)
    : n_spins_(n_spins),
      excitation_p_(excitation_p),
      elements_(std::move(elements)),
      central_up_count_(central_up_count) {}

const BasisElement& SectorBasis::element(std::size_t rank) const {
    if (rank >= elements_.size()) {
        throw std::invalid_argument("basis rank out of range");
    }
    return elements_[rank];
}

namespace {

// Lexicographic rank of a strictly increasing k-subset of {1..n}.
std::size_t subset_lex_rank(const std::vector<int>& set, int n) {
    const int k = static_cast<int>(set.size());
    std::size_t rank = 0;
    int prev = 0;
    for (int i = 0; i < k; ++i) {
        for (int v = prev + 1; v < set[static_cast<std::size_t>(i)]; ++v) {
            rank += binomial(n - v, k - i - 1);
        }
        prev = set[static_cast<std::size_t>(i)];
    }
    return rank;
}

std::vector<std::vector<int>> subsets_lex(int n, int k) {
    std::vector<std::vector<int>> result;
    result.reserve(binomial(n, k));
    std::vector<int> current(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) current[static_cast<std::size_t>(i)] = i + 1;
    if (k == 0) {
        result.push_back({});
        return result;
    }
    while (true) {
        result.push_back(current);
        // advance to the next combination in lexicographic order
        int i = k - 1;
        while (i >= 0 && current[static_cast<std::size_t>(i)] == n - k + i + 1)
            --i;
        if (i < 0) break;
        ++current[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            current[static_cast<std::size_t>(j)] =
                current[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return result;
}

} // namespace

std::size_t SectorBasis::rank_of(const BasisElement& element) const {
    const int expected =
        element.central_up ? excitation_p_ : excitation_p_ + 1;
    if (static_cast<int>(element.up_set.size()) != expected) {
        throw std::invalid_argument(
            "element does not belong to this sector (up-set size " +
            std::to_string(element.up_set.size()) + ", expected " +
            std::to_string(expected) + ")");
    }
    for (std::size_t i = 0; i < element.up_set.size(); ++i) {
        const int v = element.up_set[i];
        if (v < 1 || v > n_spins_ ||
            (i > 0 && v <= element.up_set[i - 1])) {
            throw std::invalid_argument(
                "up_set must be strictly increasing within 1..N");
        }
    }
    const std::size_t block_rank = subset_lex_rank(element.up_set, n_spins_);
    return element.central_up ? block_rank
                              : central_up_count_ + block_rank;
}

double SectorBasis::sz_eigenvalue() const {
    // identical for both blocks; evaluate on the central-up block
    const int ups = excitation_p_;
    return 0.5 + 0.5 * (ups - (n_spins_ - ups));
}

SectorBasis enumerate_sector(int n_spins, int excitation_p) {
    if (n_spins < 1) {
        throw std::invalid_argument("n_spins must be at least 1");
    }
    if (excitation_p < 0 || excitation_p > n_spins - 1) {
        throw std::invalid_argument(
            "excitation_p must satisfy 0 <= p <= N-1, got p = " +
            std::to_string(excitation_p) + " for N = " +
            std::to_string(n_spins));
    }
    std::vector<BasisElement> elements;
    elements.reserve(binomial(n_spins, excitation_p) +
                     binomial(n_spins, excitation_p + 1));
    for (auto& set : subsets_lex(n_spins, excitation_p)) {
        elements.push_back(BasisElement{true, std::move(set)});
    }
    const std::size_t up_count = elements.size();
    for (auto& set : subsets_lex(n_spins, excitation_p + 1)) {
        elements.push_back(BasisElement{false, std::move(set)});
    }
    return SectorBasis(n_spins, excitation_p, std::move(elements), up_count);
}

std::vector<int> add_index(const std::vector<int>& index_set, int r) {
    if (r < 1) {
        throw std::invalid_argument("spin index must be positive");
    }
    if (std::binary_search(index_set.begin(), index_set.end(), r)) {
        throw std::invalid_argument("index " + std::to_string(r) +
                                    " already present in the set");
    }
    std::vector<int> result;
    result.reserve(index_set.size() + 1);
    auto pos = std::lower_bound(index_set.begin(), index_set.end(), r);
    result.insert(result.end(), index_set.begin(), pos);
    result.push_back(r);
    result.insert(result.end(), pos, index_set.end());
    return result;
}

std::vector<int> remove_index(const std::vector<int>& index_set, int r) {
    auto pos = std::lower_bound(index_set.begin(), index_set.end(), r);
    if (pos == index_set.end() || *pos != r) {
        throw std::invalid_argument("index " + std::to_string(r) +
                                    " not present in the set");
    }
    std::vector<int> result;
    result.reserve(index_set.size() - 1);
    result.insert(result.end(), index_set.begin(), pos);
    result.insert(result.end(), pos + 1, index_set.end());
    return result;
}

} // namespace spinstar
