#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace kqic {

// SplitMix64 finalizer; used to turn (seed, counter...) tuples into
// well-separated engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a master seed and a path of counters, e.g.
/// derive_seed(master, {cell, trial}). The derivation is order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(master);
    for (auto c : path) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    return h;
}

/// A reproducible random stream identified by (seed, stream_id). Two streams
/// with the same identity produce identical sequences.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream_id)
        : engine_(derive_seed(seed, {stream_id})) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform() {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    double normal() { return normal_(engine_); }

    // Uniform integer in [0, bound).
    std::size_t below(std::size_t bound) {
        std::uniform_int_distribution<std::size_t> d(0, bound - 1);
        return d(engine_);
    }

    bool coin() { return (engine_() >> 63) != 0; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// n Rademacher weights (+1/-1 with probability 1/2 each), one bit per weight.
inline std::vector<double> rademacher_weights(std::uint64_t seed, std::uint64_t stream_id,
                                              std::size_t n) {
    Stream s(seed, stream_id);
    std::vector<double> w(n);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) bits = s.next_u64();
        w[i] = (bits & 1U) ? 1.0 : -1.0;
        bits >>= 1;
    }
    return w;
}

}  // namespace kqic
