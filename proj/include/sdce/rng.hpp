#pragma once

#include <cstdint>
#include <random>

#include "sdce/types.hpp"

namespace sdce {

using Rng = std::mt19937_64;

/// Identifies one reproducible random substream: a run-wide seed plus a
/// per-trial stream index.
struct StreamKey {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

/// Purposes separate the draws made for a trial so that, for example, the
/// policy sampler never perturbs the frame generator.
enum class StreamPurpose : std::uint64_t {
    frame = 1,
    policy = 2,
    instance = 3,
};

std::uint64_t splitmix64(std::uint64_t x);

Rng make_rng(const StreamKey& stream_key, StreamPurpose purpose = StreamPurpose::frame);

/// Circularly symmetric CN(0, 1): independent real and imaginary parts, each
/// N(0, 1/2).
Complex complex_normal(Rng& rng);

ComplexMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace sdce
