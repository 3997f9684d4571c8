#pragma once

#include "sdce/types.hpp"

namespace sdce {

enum class EstimateSource { pilot_only, augmented };

struct ChannelEstimate {
    ComplexMatrix matrix;
    EstimateSource source = EstimateSource::pilot_only;
    /// T_p plus the number of virtual pilots that entered the estimate.
    int pilot_count_effective = 0;
};

/// Observation and regressor blocks of an LMMSE problem, [Y_p, y...] and
/// [P, x...]. The first `pilot_columns` columns are true pilots.
struct AugmentedBlocks {
    ComplexMatrix observations;
    ComplexMatrix regressors;
    double noise_variance = 0.0;
    int pilot_columns = 0;

    /// Appends one virtual pilot column pair.
    void append(const Eigen::Ref<const ComplexVector>& observation, const Eigen::Ref<const ComplexVector>& regressor);
};

/// Y X^H (X X^H + sigma2 I)^{-1} solved through a Cholesky factorisation.
ChannelEstimate lmmse_augmented_estimate(const AugmentedBlocks& blocks);

/// Pilot-only estimate Y_p P^H (P P^H + sigma2 I)^{-1}.
ChannelEstimate lmmse_pilot_estimate(const ComplexMatrix& y_p, const ComplexMatrix& p, double sigma2);

/// Expected squared Frobenius error of the pilot-only estimate under an
/// i.i.d. CN(0, 1) channel: n_rx sigma2 Tr[(P P^H + sigma2 I)^{-1}].
double lmmse_pilot_mse(const ComplexMatrix& p, double sigma2, int n_rx);

/// (X X^H + sigma2 I)^{-1} from a fresh factorisation.
ComplexMatrix gram_inverse(const ComplexMatrix& regressors, double sigma2);

/// Inverse of a Hermitian positive definite matrix; the result is
/// symmetrised so it is exactly Hermitian.
ComplexMatrix hermitian_inverse(const ComplexMatrix& a);

/// Per-receive-antenna error covariance of the LMMSE estimate built from the
/// regressors `x_hat` when the columns actually transmitted were `x_true`:
/// sigma2 Q - sigma2^2 Q^2 + Q D D^H Q with Q = (X^ X^^H + sigma2 I)^{-1} and
/// D = X^ (X^ - X)^H + sigma2 I.
ComplexMatrix error_covariance(const ComplexMatrix& x_true, const ComplexMatrix& x_hat, double sigma2);

/// (Q^{-1} + x x^H)^{-1} from Q by the matrix inversion lemma.
ComplexMatrix rank_one_update_inverse(const ComplexMatrix& q, const Eigen::Ref<const ComplexVector>& x);

/// In-place form used on hot paths.
void rank_one_update_inverse_inplace(ComplexMatrix& q, const Eigen::Ref<const ComplexVector>& x);

void make_hermitian(ComplexMatrix& m);

}  // namespace sdce
