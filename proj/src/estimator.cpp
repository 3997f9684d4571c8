#include "sdce/estimator.hpp"

namespace sdce {

void AugmentedBlocks::append(const Eigen::Ref<const ComplexVector>& observation,
                             const Eigen::Ref<const ComplexVector>& regressor)
{
    require(observation.size() == observations.rows(), "augmented blocks: observation length mismatch");
    require(regressor.size() == regressors.rows(), "augmented blocks: regressor length mismatch");
    const Eigen::Index c = observations.cols();
    observations.conservativeResize(Eigen::NoChange, c + 1);
    regressors.conservativeResize(Eigen::NoChange, c + 1);
    observations.col(c) = observation;
    regressors.col(c) = regressor;
}

namespace {

ComplexMatrix regularised_gram(const ComplexMatrix& x, double sigma2)
{
    ComplexMatrix g = x * x.adjoint();
    g.diagonal().array() += sigma2;
    return g;
}

}  // namespace

ChannelEstimate lmmse_augmented_estimate(const AugmentedBlocks& blocks)
{
    require(blocks.noise_variance > 0.0, "lmmse: noise variance must be positive");
    require(blocks.observations.cols() == blocks.regressors.cols(),
            "lmmse: observation and regressor blocks have different column counts");
    require(blocks.observations.cols() >= blocks.pilot_columns, "lmmse: fewer columns than pilots");

    const ComplexMatrix gram = regularised_gram(blocks.regressors, blocks.noise_variance);
    const Eigen::LLT<ComplexMatrix> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("lmmse: Gram matrix is not positive definite");
    }
    // H^ G = Y X^H with G Hermitian, so H^^H = G^{-1} X Y^H.
    ComplexMatrix rhs = blocks.regressors * blocks.observations.adjoint();
    ChannelEstimate out;
    out.matrix = llt.solve(rhs).adjoint();
    out.pilot_count_effective = static_cast<int>(blocks.observations.cols());
    out.source = out.pilot_count_effective > blocks.pilot_columns ? EstimateSource::augmented
                                                                  : EstimateSource::pilot_only;
    return out;
}

ChannelEstimate lmmse_pilot_estimate(const ComplexMatrix& y_p, const ComplexMatrix& p, double sigma2)
{
    require(y_p.cols() == p.cols(), "lmmse_pilot_estimate: Y_p and P column counts differ");
    AugmentedBlocks blocks{y_p, p, sigma2, static_cast<int>(p.cols())};
    return lmmse_augmented_estimate(blocks);
}

double lmmse_pilot_mse(const ComplexMatrix& p, double sigma2, int n_rx)
{
    require(sigma2 > 0.0, "lmmse_pilot_mse: noise variance must be positive");
    return n_rx * sigma2 * real_trace(gram_inverse(p, sigma2));
}

ComplexMatrix hermitian_inverse(const ComplexMatrix& a)
{
    const Eigen::LLT<ComplexMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("hermitian_inverse: matrix is not positive definite");
    }
    ComplexMatrix inv = llt.solve(ComplexMatrix::Identity(a.rows(), a.cols()));
    make_hermitian(inv);
    return inv;
}

ComplexMatrix gram_inverse(const ComplexMatrix& regressors, double sigma2)
{
    require(sigma2 > 0.0, "gram_inverse: noise variance must be positive");
    return hermitian_inverse(regularised_gram(regressors, sigma2));
}

ComplexMatrix error_covariance(const ComplexMatrix& x_true, const ComplexMatrix& x_hat, double sigma2)
{
    require(x_true.rows() == x_hat.rows() && x_true.cols() == x_hat.cols(),
            "error_covariance: true and detected blocks differ in shape");
    require(sigma2 > 0.0, "error_covariance: noise variance must be positive");
    const ComplexMatrix q = gram_inverse(x_hat, sigma2);
    ComplexMatrix d = x_hat * (x_hat - x_true).adjoint();
    d.diagonal().array() += sigma2;
    const ComplexMatrix qd = q * d;
    ComplexMatrix cov = sigma2 * q - (sigma2 * sigma2) * (q * q) + qd * qd.adjoint();
    make_hermitian(cov);
    return cov;
}

void rank_one_update_inverse_inplace(ComplexMatrix& q, const Eigen::Ref<const ComplexVector>& x)
{
    require(q.rows() == q.cols() && q.rows() == x.size(), "rank_one_update_inverse: dimension mismatch");
    const ComplexVector qx = q * x;
    const double denom = 1.0 + real_part_checked(x.dot(qx));
    q.noalias() -= (qx * qx.adjoint()) / denom;
    make_hermitian(q);
}

ComplexMatrix rank_one_update_inverse(const ComplexMatrix& q, const Eigen::Ref<const ComplexVector>& x)
{
    ComplexMatrix out = q;
    rank_one_update_inverse_inplace(out, x);
    return out;
}

void make_hermitian(ComplexMatrix& m)
{
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    m = sym;
}

}  // namespace sdce
