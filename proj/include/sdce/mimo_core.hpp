#pragma once

#include <vector>

#include "sdce/rng.hpp"
#include "sdce/symbols.hpp"
#include "sdce/types.hpp"

namespace sdce {

enum class ChannelMode { block, gauss_markov };

/// I.i.d. CN(0, 1) Rayleigh channel, n_rx x n_tx.
ComplexMatrix draw_channel(int n_rx, int n_tx, Rng& rng);

/// One step of the first-order Gauss-Markov recursion
/// H' = sqrt(1 - eps^2) H + eps E, with E i.i.d. CN(0, 1).
ComplexMatrix evolve_channel(const ComplexMatrix& previous, double epsilon, Rng& rng);

/// Orthogonal unit-modulus pilots taken from the first n_tx rows of the
/// t_p-point DFT matrix, so that P P^H = t_p I.
ComplexMatrix build_pilot_matrix(int n_tx, int t_p);

/// y = H x + z with z ~ CN(0, sigma2 I). The unit-variance draw is scaled by
/// sqrt(sigma2), so the same stream yields paired noise across SNR points.
ComplexVector transmit(const ComplexMatrix& h, const ComplexVector& x, double sigma2, Rng& rng);

struct FrameConfig {
    int n_tx = 2;
    int n_rx = 4;
    int t_p = 4;
    int t_u = 200;
    int t_d = 200;
    double noise_variance = 0.5;
    ChannelMode channel_mode = ChannelMode::block;
    double epsilon = 0.0;
    /// When false the channel stays at its slot-0 value across the pilot block
    /// and only starts evolving at data slot 1.
    bool evolve_during_pilots = true;

    void validate() const;
};

/// One simulated transmission frame. Pilot slots are -t_p+1..0, data slots
/// are 1..t_d; data slot n lives in column n-1 of data_observations.
struct FrameRealization {
    int n_tx = 0;
    int n_rx = 0;
    int t_p = 0;
    int t_u = 0;
    int t_d = 0;
    double noise_variance = 0.0;
    ChannelMode channel_mode = ChannelMode::block;

    /// One matrix in block mode, otherwise one per slot from -t_p+1 to t_d.
    std::vector<ComplexMatrix> channels;
    ComplexMatrix pilot_matrix;
    ComplexMatrix pilot_observations;
    std::vector<std::size_t> tx_indices;
    ComplexMatrix data_observations;

    const ComplexMatrix& channel_at(int slot) const;
    auto observation(int slot) const { return data_observations.col(slot - 1); }
    std::size_t tx_index(int slot) const { return tx_indices[static_cast<std::size_t>(slot - 1)]; }
};

FrameRealization generate_frame(const FrameConfig& config, const SymbolBook& book, const StreamKey& stream_key);

}  // namespace sdce
