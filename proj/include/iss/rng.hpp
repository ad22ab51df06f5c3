#pragma once

#include <cstdint>
#include <random>

namespace iss {

// splitmix64 step; used to derive independent stream seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t global, std::uint64_t stream_id) {
    return mix_seed(mix_seed(global) ^ mix_seed(stream_id + 0x632be59bd9b4e019ull));
}

// mt19937_64 with hand-rolled draws: std::*_distribution output is not pinned
// by the standard, and run manifests promise byte-identical replays.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    Rng(std::uint64_t global, std::uint64_t stream_id) : gen_(stream_seed(global, stream_id)) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // uniform over {0, ..., n-1} by rejection
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    // index sampled from unnormalized nonnegative weights
    int categorical(const std::vector<double>& weights) {
        double total = 0;
        for (double w : weights) total += w;
        double u = uniform01() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u < 0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace iss
