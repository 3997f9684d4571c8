#include "sdce/instances.hpp"

#include <algorithm>
#include <cmath>

#include "sdce/experiment.hpp"

namespace sdce {

ComplexMatrix random_pd_matrix(int size, Rng& rng, double floor)
{
    const ComplexMatrix b = complex_normal_matrix(size, size, rng);
    ComplexMatrix a = b * b.adjoint();
    a.diagonal().array() += floor;
    return a;
}

namespace {

ComplexVector random_book_vector(const SymbolBook& book, Rng& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, book.size() - 1);
    return book.vector(pick(rng));
}

/// Expected symbol under a random posterior that leans towards `anchor`.
ComplexVector random_soft_vector(const SymbolBook& book, const ComplexVector& anchor, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RealVector w(static_cast<Eigen::Index>(book.size()));
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        w(k) = std::pow(unit(rng), 4.0);
    }
    const double lean = unit(rng);
    const ComplexVector spread = book.vectors() * (w / w.sum()).cast<Complex>();
    return lean * anchor + (1.0 - lean) * spread;
}

}  // namespace

DeltaInstance random_delta_instance(Rng& rng, int n_tx, int t_p, int prior_columns, int future_columns, double sigma2)
{
    const SymbolBook book = enumerate_symbol_vectors(make_constellation(ConstellationKind::qam4), n_tx);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const ComplexMatrix pilots = build_pilot_matrix(n_tx, t_p);
    ComplexMatrix true_side(n_tx, t_p + prior_columns);
    ComplexMatrix detected_side(n_tx, t_p + prior_columns);
    true_side.leftCols(t_p) = pilots;
    detected_side.leftCols(t_p) = pilots;
    for (int c = 0; c < prior_columns; ++c) {
        const ComplexVector truth = random_book_vector(book, rng);
        true_side.col(t_p + c) = truth;
        detected_side.col(t_p + c) = unit(rng) < 0.7 ? truth : random_book_vector(book, rng);
    }
    const ComplexMatrix observations = complex_normal_matrix(3, t_p + prior_columns, rng);

    std::vector<std::uint8_t> history(static_cast<std::size_t>(prior_columns), 1);
    const int skipped = static_cast<int>(unit(rng) * 4.0);
    history.insert(history.end(), static_cast<std::size_t>(skipped), 0);
    std::shuffle(history.begin(), history.end(), rng);

    DeltaInstance inst{MdpState::from_blocks(true_side, detected_side, observations, t_p, history, sigma2), {}, {}, {}};
    inst.x_hat_n = random_book_vector(book, rng);
    inst.x_tilde_n = random_soft_vector(book, inst.x_hat_n, rng);
    for (int i = 0; i < future_columns; ++i) {
        ComplexVector detected = random_book_vector(book, rng);
        ComplexVector expected = random_soft_vector(book, detected, rng);
        inst.future.push_back({std::move(detected), std::move(expected)});
    }
    return inst;
}

SelectionInstance random_selection_instance(const SymbolBook& book, Rng& rng, int n_rx, int t_p, int t_u,
                                            double ebn0_low_db, double ebn0_high_db)
{
    std::uniform_real_distribution<double> snr(ebn0_low_db, ebn0_high_db);
    std::uniform_int_distribution<int> slot(1, t_u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double ebn0 = snr(rng);
    FrameConfig fc;
    fc.n_tx = book.n_tx();
    fc.n_rx = n_rx;
    fc.t_p = t_p;
    fc.t_u = t_u;
    fc.t_d = t_u;
    fc.noise_variance = ebn0_to_sigma2(ebn0, book.constellation().kind);
    const FrameRealization frame = generate_frame(fc, book, StreamKey{rng(), rng()});

    SelectionInstance inst{prepare_context(frame, book), MdpState::initial(frame.pilot_matrix,
                                                                           frame.pilot_observations,
                                                                           frame.noise_variance),
                           ebn0};
    const int n = slot(rng);
    for (int m = 1; m < n; ++m) {
        const Detection& d = inst.ctx.detection(m);
        inst.state.apply(unit(rng) < 0.6 ? 1 : 0, d.vector, d.vector, inst.ctx.y(m));
    }
    return inst;
}

bool close_relative(double a, double b, double rel, double abs_floor)
{
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

}  // namespace sdce
