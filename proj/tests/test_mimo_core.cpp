#include <doctest.h>

#include <cmath>

#include "sdce/mimo_core.hpp"
#include "sdce/symbols.hpp"

using namespace sdce;

namespace {

SymbolBook qam4_book(int n_tx = 2)
{
    return enumerate_symbol_vectors(make_constellation(ConstellationKind::qam4), n_tx);
}

}  // namespace

TEST_CASE("channel entries have unit variance split evenly between real and imaginary parts")
{
    Rng rng = make_rng({7, 0});
    const int draws = 100000 / 8;
    double power = 0.0;
    double re2 = 0.0;
    double im2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const ComplexMatrix h = draw_channel(4, 2, rng);
        REQUIRE(h.rows() == 4);
        REQUIRE(h.cols() == 2);
        power += h.squaredNorm();
        re2 += h.real().squaredNorm();
        im2 += h.imag().squaredNorm();
    }
    const double n = draws * 8.0;
    CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(re2 / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(im2 / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("same stream gives the same channel")
{
    Rng a = make_rng({99, 3});
    Rng b = make_rng({99, 3});
    CHECK(draw_channel(1, 1, a)(0, 0) == draw_channel(1, 1, b)(0, 0));
    Rng c = make_rng({99, 4});
    Rng d = make_rng({99, 3});
    CHECK(draw_channel(1, 1, c)(0, 0) != draw_channel(1, 1, d)(0, 0));
    Rng e = make_rng({99, 3}, StreamPurpose::policy);
    Rng f = make_rng({99, 3}, StreamPurpose::frame);
    CHECK(draw_channel(1, 1, e)(0, 0) != draw_channel(1, 1, f)(0, 0));
}

TEST_CASE("evolve_channel edge cases")
{
    Rng rng = make_rng({1, 1});
    const ComplexMatrix h = draw_channel(4, 2, rng);
    CHECK(evolve_channel(h, 0.0, rng) == h);
    CHECK_THROWS_AS(evolve_channel(h, -0.1, rng), InvalidArgument);
    CHECK_THROWS_AS(evolve_channel(h, 1.01, rng), InvalidArgument);

    // eps = 1 discards the previous channel entirely
    double cross = 0.0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const ComplexMatrix prev = draw_channel(1, 1, rng);
        const ComplexMatrix next = evolve_channel(prev, 1.0, rng);
        cross += (std::conj(prev(0, 0)) * next(0, 0)).real();
    }
    CHECK(std::abs(cross / trials) < 4.0 * std::sqrt(0.5 / trials));
}

TEST_CASE("Gauss-Markov recursion keeps unit power at every step")
{
    Rng rng = make_rng({5, 0});
    const int chains = 10000;
    const int steps = 200;
    std::vector<double> power(steps + 1, 0.0);
    std::vector<double> power_sq(steps + 1, 0.0);
    for (int c = 0; c < chains; ++c) {
        ComplexMatrix h = draw_channel(1, 1, rng);
        for (int s = 0; s <= steps; ++s) {
            if (s > 0) {
                h = evolve_channel(h, 1e-2, rng);
            }
            const double p = std::norm(h(0, 0));
            power[s] += p;
            power_sq[s] += p * p;
        }
    }
    for (int s : {0, 1, 50, 200}) {
        const double mean = power[s] / chains;
        const double var = power_sq[s] / chains - mean * mean;
        const double se = std::sqrt(var / chains);
        CHECK(std::abs(mean - 1.0) <= 3.0 * se);
    }
}

TEST_CASE("pilot matrix is orthogonal with unit-modulus entries")
{
    for (int n_tx = 1; n_tx <= 4; ++n_tx) {
        for (int t_p = n_tx; t_p <= 9; ++t_p) {
            const ComplexMatrix p = build_pilot_matrix(n_tx, t_p);
            REQUIRE(p.rows() == n_tx);
            REQUIRE(p.cols() == t_p);
            const ComplexMatrix gram = p * p.adjoint();
            const ComplexMatrix target = static_cast<double>(t_p) * ComplexMatrix::Identity(n_tx, n_tx);
            CHECK((gram - target).norm() <= 1e-12 * t_p);
            CHECK((p.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
            for (int c = 0; c < t_p; ++c) {
                CHECK(p.col(c).squaredNorm() == doctest::Approx(n_tx));
            }
        }
    }
    const ComplexMatrix square = build_pilot_matrix(2, 2);
    CHECK((square.adjoint() * square - 2.0 * ComplexMatrix::Identity(2, 2)).norm() < 1e-14);
    CHECK_THROWS_AS(build_pilot_matrix(3, 2), InvalidArgument);
}

TEST_CASE("transmit adds noise with covariance sigma2 I")
{
    Rng rng = make_rng({11, 0});
    const ComplexMatrix h = draw_channel(4, 2, rng);
    const SymbolBook book = qam4_book();
    const ComplexVector x = book.vector(6);

    Rng r0 = make_rng({11, 1});
    CHECK((transmit(h, x, 0.0, r0) - h * x).norm() == 0.0);

    Rng r1 = make_rng({11, 2});
    Rng r2 = make_rng({11, 2});
    CHECK(transmit(h, x, 0.3, r1) == transmit(h, x, 0.3, r2));

    const double sigma2 = 0.7;
    const int draws = 10000;
    ComplexMatrix cov = ComplexMatrix::Zero(4, 4);
    for (int i = 0; i < draws; ++i) {
        const ComplexVector z = transmit(h, x, sigma2, rng) - h * x;
        cov += z * z.adjoint();
    }
    cov /= static_cast<double>(draws);
    CHECK((cov - sigma2 * ComplexMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("block-fading frame uses one channel and is consistent")
{
    const SymbolBook book = qam4_book();
    FrameConfig fc;
    fc.noise_variance = 0.25;
    const FrameRealization frame = generate_frame(fc, book, {3, 9});
    CHECK(frame.n_tx == 2);
    CHECK(frame.n_rx == 4);
    CHECK(frame.t_p == 4);
    CHECK(frame.t_u == 200);
    CHECK(frame.channels.size() == 1);
    CHECK(&frame.channel_at(-3) == &frame.channel_at(200));
    CHECK(frame.pilot_observations.cols() == 4);
    CHECK(frame.data_observations.cols() == 200);
    CHECK(frame.tx_indices.size() == 200);
    for (auto k : frame.tx_indices) {
        CHECK(k < book.size());
    }
    // residual of the pilot block is pure noise
    const ComplexMatrix z = frame.pilot_observations - frame.channel_at(0) * frame.pilot_matrix;
    CHECK(z.squaredNorm() / z.size() < 1.0);
}

TEST_CASE("frames are reproducible bit for bit")
{
    const SymbolBook book = qam4_book();
    FrameConfig fc;
    fc.channel_mode = ChannelMode::gauss_markov;
    fc.epsilon = 1.5e-2;
    fc.t_u = 30;
    fc.t_d = 40;
    const FrameRealization a = generate_frame(fc, book, {17, 2});
    const FrameRealization b = generate_frame(fc, book, {17, 2});
    REQUIRE(a.channels.size() == b.channels.size());
    for (std::size_t i = 0; i < a.channels.size(); ++i) {
        CHECK(a.channels[i] == b.channels[i]);
    }
    CHECK(a.pilot_observations == b.pilot_observations);
    CHECK(a.data_observations == b.data_observations);
    CHECK(a.tx_indices == b.tx_indices);
    const FrameRealization c = generate_frame(fc, book, {17, 3});
    CHECK(c.data_observations != a.data_observations);
}

TEST_CASE("time-varying frame evolves from the first pilot slot")
{
    const SymbolBook book = qam4_book();
    FrameConfig fc;
    fc.channel_mode = ChannelMode::gauss_markov;
    fc.epsilon = 1e-2;
    fc.t_u = 10;
    fc.t_d = 10;
    const FrameRealization frame = generate_frame(fc, book, {4, 4});
    CHECK(frame.channels.size() == 14);
    CHECK(frame.channel_at(-3) != frame.channel_at(-2));
    CHECK(frame.channel_at(9) != frame.channel_at(10));

    fc.evolve_during_pilots = false;
    const FrameRealization held = generate_frame(fc, book, {4, 4});
    CHECK(held.channel_at(-3) == held.channel_at(0));
    CHECK(held.channel_at(0) != held.channel_at(1));

    // observation at slot n uses the channel of slot n
    FrameConfig quiet = fc;
    quiet.noise_variance = 1e-30;
    quiet.evolve_during_pilots = true;
    const FrameRealization q = generate_frame(quiet, book, {4, 5});
    for (int n = 1; n <= q.t_d; ++n) {
        const ComplexVector clean = q.channel_at(n) * book.vector(q.tx_index(n));
        CHECK((q.observation(n) - clean).norm() < 1e-12);
    }
    for (int s = -3; s <= 0; ++s) {
        const ComplexVector clean = q.channel_at(s) * q.pilot_matrix.col(s + 3);
        CHECK((q.pilot_observations.col(s + 3) - clean).norm() < 1e-12);
    }
}

TEST_CASE("frame config validation")
{
    FrameConfig fc;
    CHECK_NOTHROW(fc.validate());
    fc.t_u = 300;
    CHECK_THROWS_AS(fc.validate(), InvalidArgument);
    fc = FrameConfig{};
    fc.t_p = 1;
    CHECK_THROWS_AS(fc.validate(), InvalidArgument);
    fc = FrameConfig{};
    fc.noise_variance = 0.0;
    CHECK_THROWS_AS(fc.validate(), InvalidArgument);
    fc = FrameConfig{};
    fc.channel_mode = ChannelMode::gauss_markov;
    fc.epsilon = 2.0;
    CHECK_THROWS_AS(fc.validate(), InvalidArgument);
}
