#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace compnoma {

// Per-trial random stream. The engine state is a pure function of
// (master_seed, sweep_index, trial_index), mixed through std::seed_seq, so a
// trial draws the same numbers no matter which worker runs it or when.
class TrialStream {
public:
    TrialStream(std::uint64_t master_seed, std::uint64_t sweep_index, std::uint64_t trial_index)
    {
        std::seed_seq seq{
            static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
            static_cast<std::uint32_t>(sweep_index), static_cast<std::uint32_t>(sweep_index >> 32),
            static_cast<std::uint32_t>(trial_index), static_cast<std::uint32_t>(trial_index >> 32)};
        engine_.seed(seq);
    }

    // Uniform on [0, 1) with 53 random bits. Written out instead of using
    // std::uniform_real_distribution so the sequence is identical across
    // standard library implementations.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Exp(1) by inversion.
    double exponential() { return -std::log1p(-uniform()); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace compnoma
