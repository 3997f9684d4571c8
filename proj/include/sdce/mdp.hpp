#pragma once

#include <cstdint>
#include <vector>

#include "sdce/detector.hpp"
#include "sdce/estimator.hpp"
#include "sdce/mimo_core.hpp"
#include "sdce/types.hpp"

namespace sdce {

/// Receiver-side view of one frame: everything the selection policies may
/// read. Transmitted indices are deliberately absent.
struct SelectionContext {
    const SymbolBook* book = nullptr;
    double sigma2 = 0.0;
    int t_u = 0;
    ComplexMatrix pilot_matrix;
    ComplexMatrix pilot_observations;
    /// Columns are y[1..t_u].
    ComplexMatrix observations;
    ComplexMatrix pilot_estimate;
    /// Per slot 1..t_u (stored at n-1): APPs from the pilot estimate, the MAP
    /// detection, the APP of the detected vector and the expected symbol.
    std::vector<AppVector> initial_apps;
    std::vector<Detection> detections;
    std::vector<double> reliability;
    ComplexMatrix initial_expected;

    auto y(int slot) const { return observations.col(slot - 1); }
    const Detection& detection(int slot) const { return detections[static_cast<std::size_t>(slot - 1)]; }
    double reliability_at(int slot) const { return reliability[static_cast<std::size_t>(slot - 1)]; }
    auto expected_at(int slot) const { return initial_expected.col(slot - 1); }
    const SymbolBook& symbols() const { return *book; }
};

SelectionContext prepare_context(const FrameRealization& frame, const SymbolBook& book);

struct GramRefreshEvent {
    int slot = 0;
    double drift = 0.0;
    bool forced = false;
};

/// MDP state (X_n, X^_n, a_n) with the incremental quantities the policies
/// need: Q = (X^ X^^H + sigma2 I)^{-1}, the cross term Y X^^H and the
/// mismatch D = X^ (X^ - X)^H + sigma2 I.
class MdpState {
public:
    static constexpr int default_refactor_interval = 64;
    static constexpr double consistency_tolerance = 1e-8;

    /// Initial state (P, P, empty history).
    static MdpState initial(const ComplexMatrix& pilots, const ComplexMatrix& pilot_observations, double sigma2,
                            int refactor_interval = default_refactor_interval);

    /// Arbitrary state from explicit blocks; `history` must select exactly as
    /// many columns as are appended after the first `pilot_columns`.
    static MdpState from_blocks(const ComplexMatrix& true_side, const ComplexMatrix& detected_side,
                                const ComplexMatrix& observations, int pilot_columns,
                                std::vector<std::uint8_t> history, double sigma2,
                                int refactor_interval = default_refactor_interval);

    const ComplexMatrix& true_side() const { return true_side_; }
    const ComplexMatrix& detected_side() const { return detected_side_; }
    const ComplexMatrix& observations() const { return observations_; }
    const std::vector<std::uint8_t>& action_history() const { return history_; }
    const ComplexMatrix& gram() const { return gram_; }
    const ComplexMatrix& gram_inverse() const { return gram_inverse_; }
    const ComplexMatrix& cross() const { return cross_; }
    const ComplexMatrix& mismatch() const { return mismatch_; }
    const std::vector<GramRefreshEvent>& refresh_events() const { return events_; }

    double noise_variance() const { return sigma2_; }
    int n_tx() const { return static_cast<int>(detected_side_.rows()); }
    int pilot_columns() const { return pilot_columns_; }
    int selected_count() const { return static_cast<int>(detected_side_.cols()) - pilot_columns_; }
    /// Slot n whose decision is pending.
    int slot() const { return static_cast<int>(history_.size()) + 1; }

    AugmentedBlocks blocks() const;
    /// H^(S_n) from a fresh solve over the state's blocks.
    ChannelEstimate estimate() const;
    /// Max-abs deviation of the cached inverse from a direct inversion.
    double gram_inverse_drift() const;

    /// Transition U^(S_n | action). With action 1 the columns are appended to
    /// the respective sides; with action 0 only the history grows.
    void apply(int action, const Eigen::Ref<const ComplexVector>& true_column,
               const Eigen::Ref<const ComplexVector>& detected_column,
               const Eigen::Ref<const ComplexVector>& observation);

private:
    MdpState() = default;
    void refresh(bool forced);

    ComplexMatrix true_side_;
    ComplexMatrix detected_side_;
    ComplexMatrix observations_;
    std::vector<std::uint8_t> history_;
    ComplexMatrix gram_;
    ComplexMatrix gram_inverse_;
    ComplexMatrix cross_;
    ComplexMatrix mismatch_;
    double sigma2_ = 0.0;
    int pilot_columns_ = 0;
    int refactor_interval_ = default_refactor_interval;
    int updates_since_refactor_ = 0;
    std::vector<GramRefreshEvent> events_;
};

MdpState init_state(const ComplexMatrix& pilots, const ComplexMatrix& pilot_observations, double sigma2);

/// Receiver-side transition: with action 1 the detected index is taken as
/// the transmitted one on the true side.
MdpState apply_action(const MdpState& state, int action, const Detection& detected,
                      const Eigen::Ref<const ComplexVector>& y);

}  // namespace sdce
