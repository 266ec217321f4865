#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace dmckf {

/// Seeded random source with deterministic child streams.
///
/// A stream is identified by its key path (master seed, then split keys).
/// Distinct paths give independent engines; the same path always yields the
/// same sequence, so trials, nodes and noise channels can draw from disjoint
/// reproducible streams regardless of execution order.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : RandomStream(std::vector<std::uint64_t>{seed}) {}

    RandomStream split(std::uint64_t key) const {
        auto path = path_;
        path.push_back(key);
        return RandomStream(std::move(path));
    }

    RandomStream split(std::initializer_list<std::uint64_t> keys) const {
        auto path = path_;
        path.insert(path.end(), keys.begin(), keys.end());
        return RandomStream(std::move(path));
    }

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    bool bernoulli(double p) { return uniform() < p; }
    double exponential() { return exponential_(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    explicit RandomStream(std::vector<std::uint64_t> path) : path_(std::move(path)) {
        std::vector<std::uint32_t> words;
        words.reserve(2 * path_.size() + 1);
        words.push_back(static_cast<std::uint32_t>(path_.size()));
        for (auto v : path_) {
            words.push_back(static_cast<std::uint32_t>(v));
            words.push_back(static_cast<std::uint32_t>(v >> 32));
        }
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }

    std::vector<std::uint64_t> path_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::exponential_distribution<double> exponential_{1.0};
};

}  // namespace dmckf
