#pragma once

#include <cstdint>
#include <ostream>

namespace sdce {

struct SelftestOptions {
    std::uint64_t seed = 20240611;
    int delta_instances = 300;
    int policy_states = 40;
    int inverse_instances = 300;
};

/// Runs the oracle-equivalence checks and prints one line per check.
/// Returns true when every check passes.
bool run_selftest(std::ostream& out, const SelftestOptions& options = {});

}  // namespace sdce
