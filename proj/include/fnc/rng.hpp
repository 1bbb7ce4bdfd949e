#pragma once

#include <cstdint>

namespace fnc {

// Deterministic counter-keyed random stream built on the splitmix64 update
// (Steele, Lea & Flood 2014). State is a single uint64; stream k of seed s
// starts from mix64(s ^ mix64(k+1)), so per-index streams can be created in
// any order and the draw sequence is identical on every platform.
// Normal variates come from the inverse-CDF transform through norm_quantile,
// so the only distributional code path is one that is itself under test.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t state) : state_(state) {}

    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    static RandomStream for_index(std::uint64_t seed, std::uint64_t index) {
        return RandomStream(mix64(seed ^ mix64(index + 1)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0,1): 53 random bits centered in the bin.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal();

    // Chi-square with nu degrees of freedom: sum of nu squared normals for
    // nu <= 64, Marsaglia-Tsang gamma(nu/2, 2) above.
    double next_chi_square(int nu);

private:
    std::uint64_t state_;
};

}  // namespace fnc
