#pragma once

#include <span>

#include "sdce/mdp.hpp"
#include "sdce/policy.hpp"

namespace sdce {

/// Brute-force reference quantities built from full error-covariance
/// matrices. Nothing here uses the cached inverse, rank-1 updates or the
/// closed-form reward difference.

/// Tr C_e of the virtual state reached from `state` by taking `lead_action`
/// at slot n (column pair (x^_n, x~_n)) followed by the `future` columns.
double virtual_state_covariance_trace(const MdpState& state, int lead_action,
                                      const Eigen::Ref<const ComplexVector>& x_hat_n,
                                      const Eigen::Ref<const ComplexVector>& x_tilde_n,
                                      std::span<const VirtualColumn> future);

/// Tr C_e(U~(S_n | [0, a])) - Tr C_e(U~(S_n | [1, a])).
double oracle_delta_n(const MdpState& state, const Eigen::Ref<const ComplexVector>& x_hat_n,
                      const Eigen::Ref<const ComplexVector>& x_tilde_n, std::span<const VirtualColumn> future);

/// Largest tree depth the oracle will enumerate.
inline constexpr int oracle_max_depth = 12;

/// Q(S_n, a) = Tr[C_e(S_n) - sum_{a^t} w(a^t) C_e(U~(S_n | [a, a^t, a^r]))]
/// with undiscounted rewards.
double oracle_q_value(const MdpState& state, int action, const SelectionContext& ctx, const PolicyParams& params);

}  // namespace sdce
