#pragma once

#include <cstdint>
#include <vector>

#include "sdce/mdp.hpp"
#include "sdce/policy.hpp"

namespace sdce {

struct SlotTrace {
    int slot = 0;
    std::size_t detected_index = 0;
    double reliability = 0.0;
    int action = 0;
    double score = 0.0;
    int depth = 0;
    int gram_refreshes = 0;
};

struct SelectionOutcome {
    ChannelEstimate final_estimate;
    /// a*_n for n = 1..t_u, stored at n-1.
    std::vector<std::uint8_t> selection_mask;
    std::vector<SlotTrace> trace;
    std::vector<GramRefreshEvent> refresh_events;
    std::vector<int> redetected_slots;

    int selected_count() const;
};

/// Sequential keep/skip decisions over slots 1..t_u followed by the final
/// estimate over the selected columns.
SelectionOutcome run_selection(const SelectionContext& ctx, const PolicyParams& params, Rng& rng,
                               bool record_trace = false);

SelectionOutcome run_selection(const FrameRealization& frame, const SymbolBook& book, const PolicyParams& params,
                               const StreamKey& stream_key, bool record_trace = false);

/// Detections for slots 1..t_u after MAP re-detection of every unselected
/// slot with the final estimate; selected slots keep their detections. The
/// re-detected slots are recorded in `outcome`.
std::vector<Detection> redetect_unselected(SelectionOutcome& outcome, const SelectionContext& ctx);

}  // namespace sdce
