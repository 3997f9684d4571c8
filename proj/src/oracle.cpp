#include "sdce/oracle.hpp"

#include <cstdint>

namespace sdce {

double virtual_state_covariance_trace(const MdpState& state, int lead_action,
                                      const Eigen::Ref<const ComplexVector>& x_hat_n,
                                      const Eigen::Ref<const ComplexVector>& x_tilde_n,
                                      std::span<const VirtualColumn> future)
{
    require(lead_action == 0 || lead_action == 1, "oracle: action must be 0 or 1");
    const Eigen::Index base = state.detected_side().cols();
    const Eigen::Index total = base + lead_action + static_cast<Eigen::Index>(future.size());
    ComplexMatrix x_true(state.n_tx(), total);
    ComplexMatrix x_hat(state.n_tx(), total);
    x_true.leftCols(base) = state.true_side();
    x_hat.leftCols(base) = state.detected_side();
    Eigen::Index c = base;
    if (lead_action == 1) {
        x_true.col(c) = x_tilde_n;
        x_hat.col(c) = x_hat_n;
        ++c;
    }
    for (const auto& col : future) {
        x_true.col(c) = col.expected;
        x_hat.col(c) = col.detected;
        ++c;
    }
    return real_trace(error_covariance(x_true, x_hat, state.noise_variance()));
}

double oracle_delta_n(const MdpState& state, const Eigen::Ref<const ComplexVector>& x_hat_n,
                      const Eigen::Ref<const ComplexVector>& x_tilde_n, std::span<const VirtualColumn> future)
{
    return virtual_state_covariance_trace(state, 0, x_hat_n, x_tilde_n, future) -
           virtual_state_covariance_trace(state, 1, x_hat_n, x_tilde_n, future);
}

double oracle_q_value(const MdpState& state, int action, const SelectionContext& ctx, const PolicyParams& params)
{
    params.validate();
    const int n = state.slot();
    require(n >= 1 && n <= ctx.t_u, "oracle_q_value: state is outside the selection block");
    const int depth = std::min(params.tree_depth, ctx.t_u - n);
    require(depth <= oracle_max_depth, "oracle_q_value: tree depth exceeds the oracle guard");

    std::vector<VirtualColumn> rollout;
    for (int m = n + depth + 1; m <= ctx.t_u; ++m) {
        if (ctx.reliability_at(m) >= params.eta_roll) {
            rollout.push_back({ctx.detection(m).vector, ctx.expected_at(m)});
        }
    }

    const double current = real_trace(error_covariance(state.true_side(), state.detected_side(), ctx.sigma2));
    double expected_next = 0.0;
    const std::uint64_t count = std::uint64_t{1} << depth;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        double weight = 1.0;
        AugmentedBlocks blocks = state.blocks();
        for (int l = 1; l <= depth; ++l) {
            const bool chosen = (bits >> (l - 1)) & 1U;
            const double theta = ctx.reliability_at(n + l);
            weight *= chosen ? theta : 1.0 - theta;
            if (chosen) {
                blocks.append(ctx.y(n + l), ctx.expected_at(n + l));
            }
        }
        if (weight == 0.0) {
            continue;
        }
        const ComplexMatrix refined = lmmse_augmented_estimate(blocks).matrix;
        auto refined_expected = [&](int m) {
            return expected_symbol(compute_app(ctx.y(m), refined, ctx.sigma2, ctx.symbols()), ctx.symbols());
        };

        std::vector<VirtualColumn> future;
        for (int l = 1; l <= depth; ++l) {
            if ((bits >> (l - 1)) & 1U) {
                future.push_back({ctx.detection(n + l).vector, refined_expected(n + l)});
            }
        }
        future.insert(future.end(), rollout.begin(), rollout.end());
        expected_next += weight * virtual_state_covariance_trace(state, action, ctx.detection(n).vector,
                                                                 refined_expected(n), future);
    }
    return current - expected_next;
}

}  // namespace sdce
