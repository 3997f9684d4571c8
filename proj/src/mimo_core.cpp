#include "sdce/mimo_core.hpp"

#include <cmath>
#include <numbers>

namespace sdce {

ComplexMatrix draw_channel(int n_rx, int n_tx, Rng& rng)
{
    require(n_rx >= 1 && n_tx >= 1, "draw_channel: dimensions must be positive");
    return complex_normal_matrix(n_rx, n_tx, rng);
}

ComplexMatrix evolve_channel(const ComplexMatrix& previous, double epsilon, Rng& rng)
{
    require(epsilon >= 0.0 && epsilon <= 1.0, "evolve_channel: epsilon must lie in [0, 1]");
    if (epsilon == 0.0) {
        return previous;
    }
    const double keep = std::sqrt(1.0 - epsilon * epsilon);
    return keep * previous + epsilon * complex_normal_matrix(previous.rows(), previous.cols(), rng);
}

ComplexMatrix build_pilot_matrix(int n_tx, int t_p)
{
    require(n_tx >= 1, "build_pilot_matrix: n_tx must be positive");
    require(t_p >= n_tx, "build_pilot_matrix: t_p < n_tx gives a rank-deficient pilot block");
    ComplexMatrix p(n_tx, t_p);
    for (int row = 0; row < n_tx; ++row) {
        for (int col = 0; col < t_p; ++col) {
            // Reduce the phase index first so large products stay exact.
            const int k = (row * col) % t_p;
            const double phase = -2.0 * std::numbers::pi * k / t_p;
            p(row, col) = std::polar(1.0, phase);
        }
    }
    return p;
}

ComplexVector transmit(const ComplexMatrix& h, const ComplexVector& x, double sigma2, Rng& rng)
{
    require(h.cols() == x.size(), "transmit: channel and symbol vector do not conform");
    require(sigma2 >= 0.0, "transmit: noise variance must be nonnegative");
    ComplexVector y = h * x;
    const double scale = std::sqrt(sigma2);
    for (Eigen::Index r = 0; r < y.size(); ++r) {
        y(r) += scale * complex_normal(rng);
    }
    return y;
}

void FrameConfig::validate() const
{
    require(n_tx >= 1 && n_rx >= 1, "frame: antenna counts must be positive");
    require(t_p >= n_tx, "frame: t_p must be at least n_tx");
    require(t_u >= 1 && t_u <= t_d, "frame: need 0 < t_u <= t_d");
    require(noise_variance > 0.0, "frame: noise variance must be positive");
    require(epsilon >= 0.0 && epsilon <= 1.0, "frame: epsilon must lie in [0, 1]");
}

const ComplexMatrix& FrameRealization::channel_at(int slot) const
{
    if (channels.size() == 1) {
        return channels.front();
    }
    const int offset = slot + t_p - 1;
    require(offset >= 0 && offset < static_cast<int>(channels.size()), "frame: slot out of range");
    return channels[static_cast<std::size_t>(offset)];
}

FrameRealization generate_frame(const FrameConfig& config, const SymbolBook& book, const StreamKey& stream_key)
{
    config.validate();
    require(book.n_tx() == config.n_tx, "frame: symbol book built for a different n_tx");

    Rng rng = make_rng(stream_key, StreamPurpose::frame);

    FrameRealization frame;
    frame.n_tx = config.n_tx;
    frame.n_rx = config.n_rx;
    frame.t_p = config.t_p;
    frame.t_u = config.t_u;
    frame.t_d = config.t_d;
    frame.noise_variance = config.noise_variance;
    frame.channel_mode = config.channel_mode;
    frame.pilot_matrix = build_pilot_matrix(config.n_tx, config.t_p);

    const int total_slots = config.t_p + config.t_d;
    ComplexMatrix h = draw_channel(config.n_rx, config.n_tx, rng);
    if (config.channel_mode == ChannelMode::block) {
        frame.channels.push_back(h);
    } else {
        frame.channels.reserve(static_cast<std::size_t>(total_slots));
        for (int i = 0; i < total_slots; ++i) {
            const bool in_pilot_block = i < config.t_p;
            if (i > 0 && (config.evolve_during_pilots || !in_pilot_block)) {
                h = evolve_channel(h, config.epsilon, rng);
            }
            frame.channels.push_back(h);
        }
    }

    std::uniform_int_distribution<std::size_t> pick(0, book.size() - 1);
    frame.tx_indices.resize(static_cast<std::size_t>(config.t_d));
    for (auto& k : frame.tx_indices) {
        k = pick(rng);
    }

    frame.pilot_observations.resize(config.n_rx, config.t_p);
    for (int i = 0; i < config.t_p; ++i) {
        const int slot = i - config.t_p + 1;
        frame.pilot_observations.col(i) =
            transmit(frame.channel_at(slot), frame.pilot_matrix.col(i), config.noise_variance, rng);
    }
    frame.data_observations.resize(config.n_rx, config.t_d);
    for (int n = 1; n <= config.t_d; ++n) {
        frame.data_observations.col(n - 1) =
            transmit(frame.channel_at(n), book.vector(frame.tx_index(n)), config.noise_variance, rng);
    }
    return frame;
}

}  // namespace sdce
