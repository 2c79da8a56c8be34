#pragma once

#include <cstdint>
#include <cmath>

namespace defectscan {

/// splitmix64 step. Used both as the generator state transition and as the
/// seed-derivation mixer, so every stream in the project is reproducible
/// from (seed, tags) regardless of platform or standard library.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive a child seed from a parent seed, a stream tag and an index.
/// Hierarchy used throughout: experiment seed -> per-level seed -> per-run
/// seed. The derivation is a fixed function, so sweeps are reproducible
/// and streams with different tags never collide.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream_tag,
                                 std::uint64_t index = 0) {
    std::uint64_t s = parent;
    (void)splitmix64(s);
    s ^= 0xd1b54a32d192ed03ULL * (stream_tag + 1);
    (void)splitmix64(s);
    s ^= 0x8cb92ba72f3d8dd7ULL * (index + 1);
    std::uint64_t mixed = s;
    return splitmix64(mixed);
}

namespace seed_tag {
inline constexpr std::uint64_t noise = 0x01;
inline constexpr std::uint64_t smooth_delta = 0x02;
inline constexpr std::uint64_t sweep_value = 0x03;
} // namespace seed_tag

/// Small deterministic PRNG (splitmix64 stream) with a Box-Muller Gaussian.
/// Not std::normal_distribution: its output is implementation-defined, and
/// measurement noise must be bit-reproducible from the recorded seed alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in (0, 1]; never returns 0 so log() below is safe.
    double next_unit() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal deviate, Box-Muller (no cached spare: every draw
    /// consumes exactly two uniforms, keeping streams easy to reason about).
    double next_gaussian() {
        const double u = next_unit();
        const double v = next_unit();
        return std::sqrt(-2.0 * std::log(u)) *
               std::cos(6.283185307179586476925286766559 * v);
    }

private:
    std::uint64_t state_;
};

} // namespace defectscan
