#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "sdce/estimator.hpp"
#include "sdce/instances.hpp"
#include "sdce/mimo_core.hpp"
#include "sdce/symbols.hpp"

using namespace sdce;

TEST_CASE("orthogonal pilots reduce the estimate to a scaled correlation")
{
    Rng rng = make_rng({2, 0});
    const ComplexMatrix p = build_pilot_matrix(2, 4);
    const ComplexMatrix y = complex_normal_matrix(4, 4, rng);
    const double sigma2 = 0.3;
    const ChannelEstimate est = lmmse_pilot_estimate(y, p, sigma2);
    CHECK(est.source == EstimateSource::pilot_only);
    CHECK(est.pilot_count_effective == 4);
    CHECK((est.matrix - y * p.adjoint() / (4.0 + sigma2)).norm() < 1e-14);
}

TEST_CASE("noiseless pilots recover the channel as sigma2 shrinks")
{
    Rng rng = make_rng({2, 1});
    const ComplexMatrix h = draw_channel(4, 2, rng);
    const ComplexMatrix p = build_pilot_matrix(2, 4);
    const ComplexMatrix y = h * p;
    CHECK((lmmse_pilot_estimate(y, p, 1e-10).matrix - h).norm() < 1e-9);
    CHECK_THROWS_AS(lmmse_pilot_estimate(y, p, 0.0), InvalidArgument);
    CHECK_THROWS_AS(lmmse_pilot_estimate(y, p, -1.0), InvalidArgument);
}

TEST_CASE("pilot MSE closed form")
{
    const ComplexMatrix p = build_pilot_matrix(2, 4);
    CHECK(lmmse_pilot_mse(p, 1.0, 4) == doctest::Approx(1.6).epsilon(1e-14));
    CHECK(lmmse_pilot_mse(p, 0.25, 4) == doctest::Approx(4 * 0.25 * 2 / 4.25).epsilon(1e-14));
    CHECK(lmmse_pilot_mse(p, 1e-12, 4) < 1e-11);

    Rng rng = make_rng({2, 2});
    for (int i = 0; i < 20; ++i) {
        const ComplexMatrix q = complex_normal_matrix(3, 5, rng);
        const double sigma2 = 0.1 + 0.1 * i;
        const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(q * q.adjoint());
        double expected = 0.0;
        for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
            expected += 4.0 * sigma2 / (eig.eigenvalues()(k) + sigma2);
        }
        CHECK(lmmse_pilot_mse(q, sigma2, 4) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("Monte Carlo pilot MSE matches the closed form")
{
    Rng rng = make_rng({2, 3});
    const ComplexMatrix p = build_pilot_matrix(2, 4);
    const double sigma2 = 1.0;
    const int frames = 10000;
    double total = 0.0;
    for (int f = 0; f < frames; ++f) {
        const ComplexMatrix h = draw_channel(4, 2, rng);
        const ComplexMatrix y = h * p + complex_normal_matrix(4, 4, rng);
        total += (lmmse_pilot_estimate(y, p, sigma2).matrix - h).squaredNorm();
    }
    CHECK(total / frames == doctest::Approx(lmmse_pilot_mse(p, sigma2, 4)).epsilon(0.02));
}

TEST_CASE("augmented estimate without virtual pilots equals the pilot estimate")
{
    Rng rng = make_rng({2, 4});
    const ComplexMatrix p = build_pilot_matrix(3, 5);
    const ComplexMatrix y = complex_normal_matrix(4, 5, rng);
    AugmentedBlocks blocks{y, p, 0.6, 5};
    const ChannelEstimate aug = lmmse_augmented_estimate(blocks);
    const ChannelEstimate pil = lmmse_pilot_estimate(y, p, 0.6);
    CHECK((aug.matrix - pil.matrix).norm() <= 1e-14 * pil.matrix.norm());
    CHECK(aug.pilot_count_effective == 5);
}

TEST_CASE("augmented estimate rejects mismatched blocks")
{
    AugmentedBlocks blocks{ComplexMatrix::Zero(4, 5), build_pilot_matrix(2, 4), 0.5, 4};
    CHECK_THROWS_AS(lmmse_augmented_estimate(blocks), InvalidArgument);
    AugmentedBlocks ok{ComplexMatrix::Zero(4, 4), build_pilot_matrix(2, 4), 0.5, 4};
    CHECK_THROWS_AS(ok.append(ComplexVector::Zero(4), ComplexVector::Zero(3)), InvalidArgument);
    CHECK_THROWS_AS(ok.append(ComplexVector::Zero(3), ComplexVector::Zero(2)), InvalidArgument);
}

TEST_CASE("appended columns are permutation invariant")
{
    Rng rng = make_rng({2, 5});
    const SymbolBook book = enumerate_symbol_vectors(make_constellation(ConstellationKind::qam4), 2);
    const ComplexMatrix p = build_pilot_matrix(2, 4);
    const ComplexMatrix h = draw_channel(4, 2, rng);
    AugmentedBlocks forward{h * p + complex_normal_matrix(4, 4, rng), p, 0.5, 4};
    AugmentedBlocks backward = forward;
    std::vector<std::pair<ComplexVector, ComplexVector>> cols;
    for (int i = 0; i < 5; ++i) {
        const ComplexVector x = book.vector(static_cast<std::size_t>(3 * i % 16));
        cols.emplace_back(h * x + complex_normal_matrix(4, 1, rng), x);
    }
    for (const auto& [y, x] : cols) {
        forward.append(y, x);
    }
    for (auto it = cols.rbegin(); it != cols.rend(); ++it) {
        backward.append(it->first, it->second);
    }
    const ChannelEstimate a = lmmse_augmented_estimate(forward);
    const ChannelEstimate b = lmmse_augmented_estimate(backward);
    CHECK(a.source == EstimateSource::augmented);
    CHECK(a.pilot_count_effective == 9);
    CHECK((a.matrix - b.matrix).norm() < 1e-12 * a.matrix.norm());
}

TEST_CASE("one correct virtual pilot at high SNR does not hurt on average")
{
    Rng rng = make_rng({2, 6});
    const SymbolBook book = enumerate_symbol_vectors(make_constellation(ConstellationKind::qam4), 2);
    const ComplexMatrix p = build_pilot_matrix(2, 4);
    const double sigma2 = 0.05;
    const double scale = std::sqrt(sigma2);
    double pilot_err = 0.0;
    double aug_err = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const ComplexMatrix h = draw_channel(4, 2, rng);
        AugmentedBlocks blocks{h * p + scale * complex_normal_matrix(4, 4, rng), p, sigma2, 4};
        pilot_err += (lmmse_augmented_estimate(blocks).matrix - h).squaredNorm();
        const ComplexVector x = book.vector(t % 16);
        blocks.append(h * x + scale * complex_normal_matrix(4, 1, rng), x);
        aug_err += (lmmse_augmented_estimate(blocks).matrix - h).squaredNorm();
    }
    CHECK(aug_err <= pilot_err);
}

TEST_CASE("error covariance reduces to the pilot MSE for pilot-only blocks")
{
    const ComplexMatrix p = build_pilot_matrix(2, 4);
    for (double sigma2 : {0.1, 0.5, 1.0, 2.0}) {
        const double tr = real_trace(error_covariance(p, p, sigma2));
        CHECK(tr == doctest::Approx(lmmse_pilot_mse(p, sigma2, 4) / 4.0).epsilon(1e-12));
    }
    const ComplexMatrix c = error_covariance(p, p, 1e-12);
    CHECK(c.norm() < 1e-11);
    CHECK_THROWS_AS(error_covariance(p, build_pilot_matrix(2, 5), 1.0), InvalidArgument);
}

TEST_CASE("error covariance trace is real and nonnegative")
{
    Rng rng = make_rng({2, 7});
    for (int i = 0; i < 200; ++i) {
        const int n_tx = 1 + i % 3;
        const int m = n_tx + i % 4;
        const ComplexMatrix x = complex_normal_matrix(n_tx, m, rng);
        const ComplexMatrix x_hat = complex_normal_matrix(n_tx, m, rng);
        const ComplexMatrix c = error_covariance(x, x_hat, 0.05 + 0.01 * i);
        CHECK((c - c.adjoint()).norm() < 1e-10 * (1.0 + c.norm()));
        CHECK(real_trace(c) >= 0.0);
    }
}

TEST_CASE("error covariance trace matches a Monte Carlo estimate with mismatched regressors")
{
    Rng rng = make_rng({2, 8});
    const ComplexMatrix x_true = complex_normal_matrix(2, 3, rng);
    ComplexMatrix x_hat = x_true;
    x_hat.col(2) = complex_normal_matrix(2, 1, rng);
    const double sigma2 = 0.4;
    const double scale = std::sqrt(sigma2);
    const int draws = 100000;
    const int n_rx = 4;
    double total = 0.0;
    for (int i = 0; i < draws; ++i) {
        const ComplexMatrix h = draw_channel(n_rx, 2, rng);
        AugmentedBlocks blocks{h * x_true + scale * complex_normal_matrix(n_rx, 3, rng), x_hat, sigma2, 3};
        total += (lmmse_augmented_estimate(blocks).matrix - h).squaredNorm();
    }
    const double predicted = real_trace(error_covariance(x_true, x_hat, sigma2));
    CHECK(total / draws / n_rx == doctest::Approx(predicted).epsilon(0.02));
}

TEST_CASE("rank-one inverse update")
{
    Rng rng = make_rng({2, 9});
    const ComplexMatrix q = hermitian_inverse(random_pd_matrix(4, rng));
    CHECK(rank_one_update_inverse(q, ComplexVector::Zero(4)) == q);

    ComplexVector e1 = ComplexVector::Zero(3);
    e1(0) = 1.0;
    ComplexMatrix expected = ComplexMatrix::Identity(3, 3);
    expected(0, 0) = 0.5;
    CHECK((rank_one_update_inverse(ComplexMatrix::Identity(3, 3), e1) - expected).norm() < 1e-15);

    for (int i = 0; i < 1000; ++i) {
        const int n = 1 + i % 8;
        const ComplexMatrix base = random_pd_matrix(n, rng);
        const ComplexMatrix inv = hermitian_inverse(base);
        const ComplexVector x = complex_normal_matrix(n, 1, rng);
        ComplexMatrix updated = inv;
        rank_one_update_inverse_inplace(updated, x);
        const ComplexMatrix product = updated * (base + x * x.adjoint());
        CHECK((product - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((updated - updated.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("gram inverse matches direct inversion")
{
    const ComplexMatrix p = build_pilot_matrix(2, 4);
    CHECK((gram_inverse(p, 1.0) - ComplexMatrix::Identity(2, 2) / 5.0).norm() < 1e-15);
}
