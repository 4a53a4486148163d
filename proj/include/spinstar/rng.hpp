#ifndef SPINSTAR_RNG_HPP
#define SPINSTAR_RNG_HPP

#include <cstdint>

namespace spinstar {

// Deterministic pseudo-random stream based on splitmix64 (Steele/Lea/Flood,
// the generator behind Java's SplittableRandom). Stream k of master seed s
// starts at state mix64(s + k*gamma), so distinct trajectory indices give
// statistically independent streams that are reproducible bit for bit.
class RngStream {
public:
    static constexpr const char* kAlgorithm = "splitmix64";
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    explicit RngStream(std::uint64_t seed, std::uint64_t stream_index = 0)
        : state_(mix64(seed + kGamma * (stream_index + 1))) {}

    // Rebuilds a stream from a raw state previously obtained via state();
    // the single integer recorded with a trajectory is exactly this.
    static RngStream from_state(std::uint64_t raw_state) {
        RngStream s(0);
        s.state_ = raw_state;
        return s;
    }

    std::uint64_t state() const { return state_; }

    std::uint64_t next_u64() {
        state_ += kGamma;
        return mix64(state_);
    }

    // Uniform in [0, 1), 53 significant bits.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

} // namespace spinstar

#endif // SPINSTAR_RNG_HPP
