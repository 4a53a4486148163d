#ifndef SPINSTAR_BASIS_HPP
#define SPINSTAR_BASIS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace spinstar {

// One product configuration of the joint system: the central spin plus the
// set of bath spins currently up. up_set is strictly increasing, 1-based.
struct BasisElement {
    bool central_up = false;
    std::vector<int> up_set;

    bool operator==(const BasisElement& other) const = default;
};

// Ordered basis of one conserved-S_z sector. The first block holds every
// configuration with the central spin up and |up_set| = p, the second block
// every configuration with the central spin down and |up_set| = p + 1;
// within each block up-sets are in lexicographic order.
class SectorBasis {
public:
    SectorBasis(int n_spins, int excitation_p,
                std::vector<BasisElement> elements,
                std::size_t central_up_count);

    int n_spins() const { return n_spins_; }
    int excitation_p() const { return excitation_p_; }
    std::size_t size() const { return elements_.size(); }
    std::size_t central_up_count() const { return central_up_count_; }
    std::size_t central_down_offset() const { return central_up_count_; }

    const BasisElement& element(std::size_t rank) const;
    const std::vector<BasisElement>& elements() const { return elements_; }

    // Inverse of element(): lexicographic rank within the element's block
    // plus the block offset. Throws std::invalid_argument if the element
    // does not belong to this sector.
    std::size_t rank_of(const BasisElement& element) const;

    // Total S_z eigenvalue shared by every element of the sector,
    // +-1/2 for the central spin plus (ups - downs)/2 for the bath.
    double sz_eigenvalue() const;

private:
    int n_spins_;
    int excitation_p_;
    std::vector<BasisElement> elements_;
    std::size_t central_up_count_;
};

// Binomial coefficient, exact in 64 bits for the desk-scale sizes used here.
std::uint64_t binomial(int n, int k);

// Enumerates the S_z sector reachable from a state with the central spin up
// and p bath spins up. Requires 0 <= p <= n_spins - 1 so that both blocks
// are populated. Size is C(N,p) + C(N,p+1).
SectorBasis enumerate_sector(int n_spins, int excitation_p);

// Inserts index r into a strictly increasing index set. Throws
// std::invalid_argument if r is already present or r < 1.
std::vector<int> add_index(const std::vector<int>& index_set, int r);

// Removes index r from a strictly increasing index set. Throws
// std::invalid_argument if r is absent.
std::vector<int> remove_index(const std::vector<int>& index_set, int r);

} // namespace spinstar

#endif // SPINSTAR_BASIS_HPP
