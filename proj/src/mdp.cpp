#include "sdce/mdp.hpp"

namespace sdce {

SelectionContext prepare_context(const FrameRealization& frame, const SymbolBook& book)
{
    require(book.n_tx() == frame.n_tx, "prepare_context: book and frame disagree on n_tx");
    SelectionContext ctx;
    ctx.book = &book;
    ctx.sigma2 = frame.noise_variance;
    ctx.t_u = frame.t_u;
    ctx.pilot_matrix = frame.pilot_matrix;
    ctx.pilot_observations = frame.pilot_observations;
    ctx.observations = frame.data_observations.leftCols(frame.t_u);
    ctx.pilot_estimate = lmmse_pilot_estimate(frame.pilot_observations, frame.pilot_matrix, frame.noise_variance).matrix;

    const CandidateProjection projection(ctx.pilot_estimate, book);
    const auto slots = static_cast<std::size_t>(frame.t_u);
    ctx.initial_apps.reserve(slots);
    ctx.detections.reserve(slots);
    ctx.reliability.reserve(slots);
    ctx.initial_expected.resize(frame.n_tx, frame.t_u);
    for (int n = 1; n <= frame.t_u; ++n) {
        AppVector app = projection.app(ctx.y(n), ctx.sigma2, n, AppSource::pilot_estimate);
        Detection det = map_detect(app, book);
        ctx.reliability.push_back(app[det.index]);
        ctx.initial_expected.col(n - 1) = expected_symbol(app, book);
        ctx.detections.push_back(std::move(det));
        ctx.initial_apps.push_back(std::move(app));
    }
    return ctx;
}

MdpState MdpState::initial(const ComplexMatrix& pilots, const ComplexMatrix& pilot_observations, double sigma2,
                           int refactor_interval)
{
    return from_blocks(pilots, pilots, pilot_observations, static_cast<int>(pilots.cols()), {}, sigma2,
                       refactor_interval);
}

MdpState MdpState::from_blocks(const ComplexMatrix& true_side, const ComplexMatrix& detected_side,
                               const ComplexMatrix& observations, int pilot_columns,
                               std::vector<std::uint8_t> history, double sigma2, int refactor_interval)
{
    require(sigma2 > 0.0, "mdp state: noise variance must be positive");
    require(true_side.rows() == detected_side.rows() && true_side.cols() == detected_side.cols(),
            "mdp state: true and detected sides differ in shape");
    require(observations.cols() == detected_side.cols(), "mdp state: observation block column count mismatch");
    require(pilot_columns >= 0 && pilot_columns <= detected_side.cols(), "mdp state: bad pilot column count");
    require(refactor_interval >= 1, "mdp state: refactor interval must be positive");
    std::size_t ones = 0;
    for (auto a : history) {
        require(a <= 1, "mdp state: actions must be binary");
        ones += a;
    }
    require(static_cast<Eigen::Index>(ones) == detected_side.cols() - pilot_columns,
            "mdp state: history weight differs from the appended column count");

    MdpState s;
    s.true_side_ = true_side;
    s.detected_side_ = detected_side;
    s.observations_ = observations;
    s.history_ = std::move(history);
    s.sigma2_ = sigma2;
    s.pilot_columns_ = pilot_columns;
    s.refactor_interval_ = refactor_interval;
    s.gram_ = detected_side * detected_side.adjoint();
    s.gram_.diagonal().array() += sigma2;
    s.gram_inverse_ = hermitian_inverse(s.gram_);
    s.cross_ = observations * detected_side.adjoint();
    s.mismatch_ = detected_side * (detected_side - true_side).adjoint();
    s.mismatch_.diagonal().array() += sigma2;
    return s;
}

AugmentedBlocks MdpState::blocks() const
{
    return AugmentedBlocks{observations_, detected_side_, sigma2_, pilot_columns_};
}

ChannelEstimate MdpState::estimate() const
{
    return lmmse_augmented_estimate(blocks());
}

double MdpState::gram_inverse_drift() const
{
    return (gram_inverse_ - hermitian_inverse(gram_)).cwiseAbs().maxCoeff();
}

void MdpState::apply(int action, const Eigen::Ref<const ComplexVector>& true_column,
                     const Eigen::Ref<const ComplexVector>& detected_column,
                     const Eigen::Ref<const ComplexVector>& observation)
{
    require(action == 0 || action == 1, "mdp state: action must be 0 or 1");
    history_.push_back(static_cast<std::uint8_t>(action));
    if (action == 0) {
        return;
    }
    require(detected_column.size() == detected_side_.rows() && true_column.size() == true_side_.rows(),
            "mdp state: appended column has the wrong length");
    require(observation.size() == observations_.rows(), "mdp state: observation has the wrong length");

    const Eigen::Index c = detected_side_.cols();
    true_side_.conservativeResize(Eigen::NoChange, c + 1);
    detected_side_.conservativeResize(Eigen::NoChange, c + 1);
    observations_.conservativeResize(Eigen::NoChange, c + 1);
    true_side_.col(c) = true_column;
    detected_side_.col(c) = detected_column;
    observations_.col(c) = observation;

    gram_.noalias() += detected_column * detected_column.adjoint();
    cross_.noalias() += observation * detected_column.adjoint();
    mismatch_.noalias() += detected_column * (detected_column - true_column).adjoint();
    rank_one_update_inverse_inplace(gram_inverse_, detected_column);

    ++updates_since_refactor_;
    if (updates_since_refactor_ >= refactor_interval_) {
        refresh(false);
        return;
    }
    const ComplexMatrix residual = gram_inverse_ * gram_ - ComplexMatrix::Identity(gram_.rows(), gram_.cols());
    if (residual.cwiseAbs().maxCoeff() > consistency_tolerance) {
        refresh(true);
    }
}

void MdpState::refresh(bool forced)
{
    const ComplexMatrix direct = hermitian_inverse(gram_);
    events_.push_back({slot() - 1, (gram_inverse_ - direct).cwiseAbs().maxCoeff(), forced});
    gram_inverse_ = direct;
    updates_since_refactor_ = 0;
}

MdpState init_state(const ComplexMatrix& pilots, const ComplexMatrix& pilot_observations, double sigma2)
{
    return MdpState::initial(pilots, pilot_observations, sigma2);
}

MdpState apply_action(const MdpState& state, int action, const Detection& detected,
                      const Eigen::Ref<const ComplexVector>& y)
{
    MdpState next = state;
    next.apply(action, detected.vector, detected.vector, y);
    return next;
}

}  // namespace sdce
