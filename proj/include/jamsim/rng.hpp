#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace jamsim {

// Deterministic named sub-streams derived from one master seed.  Every
// component (traffic, per-link shadowing, per-node sensing noise, training
// shuffles, ...) owns its own stream so that the order in which components
// consume randomness cannot perturb the others.
class RngStream {
public:
    RngStream() : engine_(0) {}
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    static RngStream derive(std::uint64_t master, std::string_view label) {
        return RngStream(mix(master, label));
    }

    RngStream fork(std::string_view label) {
        // Child seed depends on the parent stream position.
        return RngStream(mix(engine_(), label));
    }

    double uniform() { return unit_(engine_); }                  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return normal_(engine_); }
    bool bernoulli(double p) { return uniform() < p; }
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t mix(std::uint64_t seed, std::string_view label) {
        // FNV-1a over the label, then a splitmix64 finalizer.
        std::uint64_t h = 14695981039346656037ull;
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ull + h;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace jamsim
