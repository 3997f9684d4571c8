#include "sdce/policy.hpp"

#include <cmath>

namespace sdce {

void PolicyParams::validate() const
{
    require(tree_depth >= 0, "policy: tree depth must be nonnegative");
    require(n_sample >= 1, "policy: n_sample must be at least 1");
    require(eta_roll >= 0.0 && eta_roll <= 1.0, "policy: eta_roll must lie in [0, 1]");
    require(gamma == 1.0, "policy: only gamma = 1 is supported");
}

ActionSequence rollout_actions(std::span<const double> reliabilities, double eta_roll)
{
    require(eta_roll >= 0.0 && eta_roll <= 1.0, "rollout_actions: eta_roll must lie in [0, 1]");
    ActionSequence out;
    out.reserve(reliabilities.size());
    for (double r : reliabilities) {
        out.push_back(r >= eta_roll ? 1 : 0);
    }
    return out;
}

ActionSequence sample_tree_actions(std::span<const double> reliabilities, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ActionSequence out;
    out.reserve(reliabilities.size());
    for (double r : reliabilities) {
        // unit() lies in [0, 1), so r = 1 always selects and r = 0 never does.
        out.push_back(unit(rng) < r ? 1 : 0);
    }
    return out;
}

double tree_weight(std::span<const std::uint8_t> actions, std::span<const double> reliabilities)
{
    require(actions.size() == reliabilities.size(), "tree_weight: action and APP counts differ");
    double w = 1.0;
    for (std::size_t l = 0; l < actions.size(); ++l) {
        w *= actions[l] ? reliabilities[l] : 1.0 - reliabilities[l];
    }
    return w;
}

DeltaWorkspace delta_workspace(const ComplexMatrix& q, const ComplexMatrix& d,
                               const Eigen::Ref<const ComplexVector>& x_hat_n,
                               const Eigen::Ref<const ComplexVector>& x_tilde_n)
{
    DeltaWorkspace w;
    w.q = q;
    w.d = d;
    const ComplexVector qx = q * x_hat_n;
    w.alpha = real_part_checked(x_hat_n.dot(qx));
    const double scale = 1.0 / std::sqrt(1.0 + w.alpha);
    w.t = scale * qx;
    w.e = scale * (x_hat_n - x_tilde_n);
    w.u = d.adjoint() * w.t;
    const double t_norm2 = w.t.squaredNorm();
    if (t_norm2 == 0.0) {
        w.v = ComplexVector::Zero(q.rows());
        return w;
    }
    const ComplexVector qt = q * w.t;
    w.v = d.adjoint() * qt / t_norm2;
    w.beta = real_part_checked(w.t.dot(qt)) / t_norm2;
    return w;
}

double delta_from_workspace(const DeltaWorkspace& w, double sigma2)
{
    const double t_norm2 = w.t.squaredNorm();
    if (t_norm2 == 0.0) {
        return 0.0;
    }
    const double s4 = sigma2 * sigma2;
    return t_norm2 * (sigma2 + s4 * (t_norm2 - 2.0 * w.beta) + w.v.squaredNorm() - (w.e - w.u + w.v).squaredNorm());
}

double delta_n(const MdpState& state, const Eigen::Ref<const ComplexVector>& x_hat_n,
               const Eigen::Ref<const ComplexVector>& x_tilde_n, std::span<const VirtualColumn> future)
{
    require(x_hat_n.size() == state.n_tx() && x_tilde_n.size() == state.n_tx(), "delta_n: column length mismatch");
    ComplexMatrix q = state.gram_inverse();
    ComplexMatrix d = state.mismatch();
    for (const auto& col : future) {
        require(col.detected.size() == state.n_tx() && col.expected.size() == state.n_tx(),
                "delta_n: future column length mismatch");
        rank_one_update_inverse_inplace(q, col.detected);
        d.noalias() += col.detected * (col.detected - col.expected).adjoint();
    }
    return delta_from_workspace(delta_workspace(q, d, x_hat_n, x_tilde_n), state.noise_variance());
}

RefinedApps tree_refined_apps(const MdpState& state, std::span<const std::uint8_t> tree_actions,
                              const SelectionContext& ctx)
{
    const int n = state.slot();
    const int last = n + static_cast<int>(tree_actions.size());
    require(n >= 1 && last <= ctx.t_u, "tree_refined_apps: tree actions run past the selection block");

    ComplexMatrix q = state.gram_inverse();
    ComplexMatrix r = state.cross();
    for (std::size_t l = 0; l < tree_actions.size(); ++l) {
        if (!tree_actions[l]) {
            continue;
        }
        const int m = n + static_cast<int>(l) + 1;
        const auto x = ctx.expected_at(m);
        rank_one_update_inverse_inplace(q, x);
        r.noalias() += ctx.y(m) * x.adjoint();
    }

    RefinedApps out;
    out.first_slot = n;
    out.estimate = r * q;
    const CandidateProjection projection(out.estimate, ctx.symbols());
    out.expected.resize(state.n_tx(), last - n + 1);
    out.apps.reserve(static_cast<std::size_t>(last - n + 1));
    for (int m = n; m <= last; ++m) {
        out.apps.push_back(projection.app(ctx.y(m), ctx.sigma2, m, AppSource::tree_refined));
        out.expected.col(m - n) = expected_symbol(out.apps.back(), ctx.symbols());
    }
    return out;
}

LookaheadPlan plan_lookahead(const MdpState& state, const SelectionContext& ctx, const PolicyParams& params)
{
    params.validate();
    const int n = state.slot();
    require(n >= 1 && n <= ctx.t_u, "plan_lookahead: state is outside the selection block");

    LookaheadPlan plan;
    plan.slot = n;
    plan.depth = std::min(params.tree_depth, ctx.t_u - n);
    const int first_rollout = n + plan.depth + 1;
    plan.rollout = rollout_actions(
        std::span<const double>(ctx.reliability).subspan(static_cast<std::size_t>(first_rollout - 1)),
        params.eta_roll);
    plan.tree_reliability.assign(ctx.reliability.begin() + n, ctx.reliability.begin() + n + plan.depth);

    plan.q_base = state.gram_inverse();
    plan.d_base = state.mismatch();
    for (std::size_t i = 0; i < plan.rollout.size(); ++i) {
        if (!plan.rollout[i]) {
            continue;
        }
        const int m = first_rollout + static_cast<int>(i);
        const ComplexVector& x_hat = ctx.detection(m).vector;
        rank_one_update_inverse_inplace(plan.q_base, x_hat);
        plan.d_base.noalias() += x_hat * (x_hat - ctx.expected_at(m)).adjoint();
    }
    return plan;
}

double evaluate_tree_sequence(const MdpState& state, const SelectionContext& ctx, const LookaheadPlan& plan,
                              std::span<const std::uint8_t> tree_actions)
{
    require(static_cast<int>(tree_actions.size()) == plan.depth, "evaluate_tree_sequence: wrong sequence length");
    const RefinedApps refined = tree_refined_apps(state, tree_actions, ctx);
    const int n = plan.slot;

    ComplexMatrix q = plan.q_base;
    ComplexMatrix d = plan.d_base;
    for (int l = 1; l <= plan.depth; ++l) {
        if (!tree_actions[static_cast<std::size_t>(l - 1)]) {
            continue;
        }
        const ComplexVector& x_hat = ctx.detection(n + l).vector;
        rank_one_update_inverse_inplace(q, x_hat);
        d.noalias() += x_hat * (x_hat - refined.expected.col(l)).adjoint();
    }
    const DeltaWorkspace w = delta_workspace(q, d, ctx.detection(n).vector, refined.expected.col(0));
    return delta_from_workspace(w, ctx.sigma2);
}

PolicyDecision optimal_policy(const MdpState& state, const SelectionContext& ctx, const PolicyParams& params)
{
    const LookaheadPlan plan = plan_lookahead(state, ctx, params);
    require(plan.depth <= 24, "optimal_policy: tree depth too large to enumerate");
    const std::uint64_t count = std::uint64_t{1} << plan.depth;
    ActionSequence tree(static_cast<std::size_t>(plan.depth));
    double total = 0.0;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        for (int l = 0; l < plan.depth; ++l) {
            tree[static_cast<std::size_t>(l)] = static_cast<std::uint8_t>((bits >> l) & 1U);
        }
        const double w = tree_weight(tree, plan.tree_reliability);
        if (w == 0.0) {
            continue;
        }
        total += w * evaluate_tree_sequence(state, ctx, plan, tree);
    }
    return {total >= 0.0 ? 1 : 0, total, plan.depth};
}

PolicyDecision low_complexity_policy(const MdpState& state, const SelectionContext& ctx, const PolicyParams& params,
                                     Rng& rng)
{
    const LookaheadPlan plan = plan_lookahead(state, ctx, params);
    double mean = 0.0;
    for (int s = 1; s <= params.n_sample; ++s) {
        const ActionSequence tree = sample_tree_actions(plan.tree_reliability, rng);
        const double delta = evaluate_tree_sequence(state, ctx, plan, tree);
        mean = (static_cast<double>(s - 1) / s) * mean + delta / s;
    }
    return {mean >= 0.0 ? 1 : 0, mean, plan.depth};
}

}  // namespace sdce
