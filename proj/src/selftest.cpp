#include "sdce/selftest.hpp"

#include <cmath>
#include <string>

#include "sdce/estimator.hpp"
#include "sdce/experiment.hpp"
#include "sdce/instances.hpp"
#include "sdce/oracle.hpp"
#include "sdce/selection.hpp"

namespace sdce {

namespace {

bool report(std::ostream& out, const std::string& name, bool ok, const std::string& detail)
{
    out << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << '\n';
    return ok;
}

bool check_inverse_update(std::ostream& out, const SelftestOptions& options)
{
    Rng rng = make_rng({options.seed, 1}, StreamPurpose::instance);
    std::uniform_int_distribution<int> size(1, 8);
    double worst = 0.0;
    for (int i = 0; i < options.inverse_instances; ++i) {
        const int n = size(rng);
        const ComplexMatrix q = hermitian_inverse(random_pd_matrix(n, rng));
        const ComplexVector x = complex_normal_matrix(n, 1, rng);
        const ComplexMatrix updated = rank_one_update_inverse(q, x);
        const ComplexMatrix product = updated * (hermitian_inverse(q) + x * x.adjoint());
        worst = std::max(worst, (product - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    return report(out, "rank-one inverse update", worst <= 1e-10, "max |residual| = " + format_number(worst));
}

bool check_delta(std::ostream& out, const SelftestOptions& options)
{
    Rng rng = make_rng({options.seed, 2}, StreamPurpose::instance);
    std::uniform_int_distribution<int> ntx(2, 3);
    std::uniform_int_distribution<int> count(0, 3);
    std::uniform_real_distribution<double> noise(0.1, 2.0);
    int failures = 0;
    double worst = 0.0;
    for (int i = 0; i < options.delta_instances; ++i) {
        const int n_tx = ntx(rng);
        const int t_p = std::uniform_int_distribution<int>(n_tx, 4)(rng);
        const DeltaInstance inst = random_delta_instance(rng, n_tx, t_p, count(rng), count(rng), noise(rng));
        const double fast = delta_n(inst.state, inst.x_hat_n, inst.x_tilde_n, inst.future);
        const double slow = oracle_delta_n(inst.state, inst.x_hat_n, inst.x_tilde_n, inst.future);
        failures += !close_relative(fast, slow, 1e-8, 1e-12);
        worst = std::max(worst, std::abs(fast - slow) / std::max(std::abs(slow), 1e-12));
    }
    return report(out, "closed-form reward difference vs covariance oracle", failures == 0,
                  std::to_string(failures) + " mismatches, worst relative gap " + format_number(worst));
}

bool check_policy(std::ostream& out, const SelftestOptions& options)
{
    Rng rng = make_rng({options.seed, 3}, StreamPurpose::instance);
    const SymbolBook book = enumerate_symbol_vectors(make_constellation(ConstellationKind::qam4), 2);
    int mismatches = 0;
    for (int i = 0; i < options.policy_states; ++i) {
        SelectionInstance inst = random_selection_instance(book, rng, 4, 4, 10, -4.0, 4.0);
        PolicyParams params;
        params.tree_depth = i % 4;
        params.kind = PolicyKind::optimal;
        const PolicyDecision decision = optimal_policy(inst.state, inst.ctx, params);
        const double q1 = oracle_q_value(inst.state, 1, inst.ctx, params);
        const double q0 = oracle_q_value(inst.state, 0, inst.ctx, params);
        mismatches += decision.action != (q1 >= q0 ? 1 : 0);
    }
    return report(out, "optimal policy vs Q-value oracle", mismatches == 0,
                  std::to_string(mismatches) + " of " + std::to_string(options.policy_states) + " decisions differ");
}

bool check_weights(std::ostream& out, const SelftestOptions& options)
{
    Rng rng = make_rng({options.seed, 4}, StreamPurpose::instance);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int depth = 0; depth <= 8; ++depth) {
        std::vector<double> theta(static_cast<std::size_t>(depth));
        for (auto& t : theta) {
            t = unit(rng);
        }
        double total = 0.0;
        ActionSequence a(static_cast<std::size_t>(depth));
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << depth); ++bits) {
            for (int l = 0; l < depth; ++l) {
                a[static_cast<std::size_t>(l)] = static_cast<std::uint8_t>((bits >> l) & 1U);
            }
            total += tree_weight(a, theta);
        }
        worst = std::max(worst, std::abs(total - 1.0));
    }
    return report(out, "tree weight normalisation", worst <= 1e-12, "max |sum - 1| = " + format_number(worst));
}

bool check_no_selection(std::ostream& out, const SelftestOptions& options)
{
    const SymbolBook book = enumerate_symbol_vectors(make_constellation(ConstellationKind::qam4), 2);
    FrameConfig fc;
    fc.t_u = 20;
    fc.t_d = 20;
    fc.noise_variance = 0.5;
    const FrameRealization frame = generate_frame(fc, book, {options.seed, 5});
    const SelectionContext ctx = prepare_context(frame, book);
    MdpState state = MdpState::initial(ctx.pilot_matrix, ctx.pilot_observations, ctx.sigma2);
    for (int n = 1; n <= ctx.t_u; ++n) {
        state.apply(0, ctx.detection(n).vector, ctx.detection(n).vector, ctx.y(n));
    }
    const double gap = (state.estimate().matrix - ctx.pilot_estimate).norm() / ctx.pilot_estimate.norm();
    return report(out, "all-zero mask reproduces the pilot estimate", gap <= 1e-14,
                  "relative gap " + format_number(gap));
}

}  // namespace

bool run_selftest(std::ostream& out, const SelftestOptions& options)
{
    bool ok = true;
    ok &= check_inverse_update(out, options);
    ok &= check_delta(out, options);
    ok &= check_policy(out, options);
    ok &= check_weights(out, options);
    ok &= check_no_selection(out, options);
    out << (ok ? "selftest passed" : "selftest FAILED") << '\n';
    return ok;
}

}  // namespace sdce
