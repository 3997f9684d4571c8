#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdce/mdp.hpp"
#include "sdce/rng.hpp"

namespace sdce {

enum class PolicyKind { optimal, low_complexity };

struct PolicyParams {
    int tree_depth = 8;
    int n_sample = 10;
    double eta_roll = 0.5;
    /// Only gamma = 1 is supported; the closed form telescopes undiscounted
    /// rewards.
    double gamma = 1.0;
    PolicyKind kind = PolicyKind::low_complexity;

    void validate() const;
};

using ActionSequence = std::vector<std::uint8_t>;

/// a_m = 1 iff the APP of the detected vector reaches eta_roll (inclusive).
ActionSequence rollout_actions(std::span<const double> reliabilities, double eta_roll);

/// Independent Bernoulli(reliability) draws, one per slot.
ActionSequence sample_tree_actions(std::span<const double> reliabilities, Rng& rng);

/// Probability of `actions` under the tree policy:
/// prod theta^a (1 - theta)^(1 - a).
double tree_weight(std::span<const std::uint8_t> actions, std::span<const double> reliabilities);

/// A virtual-pilot column pair (x^, x~): the detected vector and the
/// expected vector standing in for the unknown transmitted one.
struct VirtualColumn {
    ComplexVector detected;
    ComplexVector expected;
};

/// The auxiliary quantities of the closed-form reward difference for one
/// candidate column x^[n] against Q = Q_n(a), D = D_n(a).
struct DeltaWorkspace {
    ComplexMatrix q;
    ComplexMatrix d;
    ComplexVector t;
    ComplexVector e;
    ComplexVector u;
    ComplexVector v;
    double alpha = 0.0;
    double beta = 0.0;
};

DeltaWorkspace delta_workspace(const ComplexMatrix& q, const ComplexMatrix& d,
                               const Eigen::Ref<const ComplexVector>& x_hat_n,
                               const Eigen::Ref<const ComplexVector>& x_tilde_n);

/// |t|^2 { s2 + s2^2 (|t|^2 - 2 beta) + |v|^2 - |e - u + v|^2 }; zero when t
/// vanishes.
double delta_from_workspace(const DeltaWorkspace& w, double sigma2);

/// Reduction in per-antenna MSE trace from selecting slot n (x^_n, x~_n) on
/// top of the future columns `future`, evaluated in closed form from the
/// state's cached inverse via rank-1 updates.
double delta_n(const MdpState& state, const Eigen::Ref<const ComplexVector>& x_hat_n,
               const Eigen::Ref<const ComplexVector>& x_tilde_n, std::span<const VirtualColumn> future);

/// Channel estimate and APPs after virtually taking the tree actions a^t
/// from the state, for slots n..n+|a^t|.
struct RefinedApps {
    int first_slot = 0;
    ComplexMatrix estimate;
    std::vector<AppVector> apps;
    /// Column i is the refined expected symbol of slot first_slot + i.
    ComplexMatrix expected;
};

RefinedApps tree_refined_apps(const MdpState& state, std::span<const std::uint8_t> tree_actions,
                              const SelectionContext& ctx);

/// Per-slot quantities shared by every tree sequence evaluated at a state:
/// the effective depth, the rollout actions, and Q/D with the rollout
/// columns already folded in.
struct LookaheadPlan {
    int slot = 0;
    int depth = 0;
    ActionSequence rollout;
    ComplexMatrix q_base;
    ComplexMatrix d_base;
    std::vector<double> tree_reliability;
};

LookaheadPlan plan_lookahead(const MdpState& state, const SelectionContext& ctx, const PolicyParams& params);

/// Delta_n([a^t, a^r]) for one tree sequence.
double evaluate_tree_sequence(const MdpState& state, const SelectionContext& ctx, const LookaheadPlan& plan,
                              std::span<const std::uint8_t> tree_actions);

struct PolicyDecision {
    int action = 0;
    /// Weighted sum of Delta_n (optimal) or its running sample mean.
    double score = 0.0;
    int depth = 0;
};

/// Enumerates every tree sequence and thresholds the weighted sum at 0.
PolicyDecision optimal_policy(const MdpState& state, const SelectionContext& ctx, const PolicyParams& params);

/// Averages Delta_n over n_sample sampled tree sequences.
PolicyDecision low_complexity_policy(const MdpState& state, const SelectionContext& ctx, const PolicyParams& params,
                                     Rng& rng);

}  // namespace sdce
