#include "sdce/selection.hpp"

#include <numeric>

namespace sdce {

int SelectionOutcome::selected_count() const
{
    return std::accumulate(selection_mask.begin(), selection_mask.end(), 0);
}

SelectionOutcome run_selection(const SelectionContext& ctx, const PolicyParams& params, Rng& rng, bool record_trace)
{
    params.validate();
    MdpState state = MdpState::initial(ctx.pilot_matrix, ctx.pilot_observations, ctx.sigma2);

    SelectionOutcome out;
    out.selection_mask.reserve(static_cast<std::size_t>(ctx.t_u));
    for (int n = 1; n <= ctx.t_u; ++n) {
        const PolicyDecision decision = params.kind == PolicyKind::optimal
                                            ? optimal_policy(state, ctx, params)
                                            : low_complexity_policy(state, ctx, params, rng);
        const Detection& detected = ctx.detection(n);
        const std::size_t events_before = state.refresh_events().size();
        state.apply(decision.action, detected.vector, detected.vector, ctx.y(n));
        out.selection_mask.push_back(static_cast<std::uint8_t>(decision.action));
        if (record_trace) {
            out.trace.push_back({n, detected.index, ctx.reliability_at(n), decision.action, decision.score,
                                 decision.depth,
                                 static_cast<int>(state.refresh_events().size() - events_before)});
        }
    }
    out.final_estimate = state.estimate();
    out.refresh_events = state.refresh_events();
    return out;
}

SelectionOutcome run_selection(const FrameRealization& frame, const SymbolBook& book, const PolicyParams& params,
                               const StreamKey& stream_key, bool record_trace)
{
    const SelectionContext ctx = prepare_context(frame, book);
    Rng rng = make_rng(stream_key, StreamPurpose::policy);
    return run_selection(ctx, params, rng, record_trace);
}

std::vector<Detection> redetect_unselected(SelectionOutcome& outcome, const SelectionContext& ctx)
{
    require(static_cast<int>(outcome.selection_mask.size()) == ctx.t_u, "redetect: mask length differs from t_u");
    std::vector<Detection> detections = ctx.detections;
    outcome.redetected_slots.clear();
    const CandidateProjection projection(outcome.final_estimate.matrix, ctx.symbols());
    for (int n = 1; n <= ctx.t_u; ++n) {
        if (outcome.selection_mask[static_cast<std::size_t>(n - 1)]) {
            continue;
        }
        const AppVector app = projection.app(ctx.y(n), ctx.sigma2, n, AppSource::final_estimate);
        detections[static_cast<std::size_t>(n - 1)] = map_detect(app, ctx.symbols());
        outcome.redetected_slots.push_back(n);
    }
    return detections;
}

}  // namespace sdce
