#include "sdce/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdce {

ConstellationKind parse_constellation(const std::string& name)
{
    if (name == "4qam" || name == "qpsk") {
        return ConstellationKind::qam4;
    }
    if (name == "bpsk") {
        return ConstellationKind::bpsk;
    }
    throw InvalidArgument("unknown constellation: " + name);
}

std::string to_string(ConstellationKind kind)
{
    return kind == ConstellationKind::bpsk ? "bpsk" : "4qam";
}

Constellation make_constellation(ConstellationKind kind)
{
    Constellation c;
    c.kind = kind;
    if (kind == ConstellationKind::bpsk) {
        c.points = {Complex{1.0, 0.0}, Complex{-1.0, 0.0}};
        c.labels = {0b0, 0b1};
        c.bits_per_symbol = 1;
        return c;
    }
    const double a = 1.0 / std::sqrt(2.0);
    c.points = {Complex{a, a}, Complex{-a, a}, Complex{-a, -a}, Complex{a, -a}};
    c.labels = {0b00, 0b01, 0b11, 0b10};
    c.bits_per_symbol = 2;
    return c;
}

SymbolBook::SymbolBook(Constellation constellation, int n_tx, std::size_t max_size)
    : constellation_(std::move(constellation)), n_tx_(n_tx)
{
    require(!constellation_.points.empty(), "symbol book: empty constellation");
    require(n_tx >= 1, "symbol book: n_tx must be positive");
    const std::size_t m = constellation_.size();
    std::size_t k_total = 1;
    for (int i = 0; i < n_tx; ++i) {
        require(k_total <= max_size / m, "symbol book: K exceeds the configured cap");
        k_total *= m;
    }
    vectors_.resize(n_tx, static_cast<Eigen::Index>(k_total));
    for (std::size_t k = 0; k < k_total; ++k) {
        for (int ant = 0; ant < n_tx; ++ant) {
            vectors_(ant, static_cast<Eigen::Index>(k)) = constellation_.points[point_index(k, ant)];
        }
    }
}

std::size_t SymbolBook::point_index(std::size_t k, int antenna) const
{
    const std::size_t m = constellation_.size();
    for (int i = n_tx_ - 1; i > antenna; --i) {
        k /= m;
    }
    return k % m;
}

SymbolBook enumerate_symbol_vectors(const Constellation& constellation, int n_tx, std::size_t max_size)
{
    return SymbolBook(constellation, n_tx, max_size);
}

CandidateProjection::CandidateProjection(const ComplexMatrix& h, const SymbolBook& book)
    : projected_(h * book.vectors())
{
    require(h.cols() == book.n_tx(), "candidate projection: channel and book do not conform");
}

AppVector CandidateProjection::app(const Eigen::Ref<const ComplexVector>& y, double sigma2, int slot,
                                   AppSource source) const
{
    require(sigma2 > 0.0, "compute_app: noise variance must be positive");
    require(y.size() == projected_.rows(), "compute_app: received vector has the wrong length");
    const auto k_total = static_cast<std::size_t>(projected_.cols());
    AppVector out;
    out.slot = slot;
    out.source = source;
    out.probs.resize(k_total);

    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_total; ++k) {
        const double metric = -(y - projected_.col(static_cast<Eigen::Index>(k))).squaredNorm() / sigma2;
        out.probs[k] = metric;
        best = std::max(best, metric);
    }
    double total = 0.0;
    for (auto& p : out.probs) {
        p = std::exp(p - best);
        total += p;
    }
    for (auto& p : out.probs) {
        p /= total;
    }
    return out;
}

AppVector compute_app(const Eigen::Ref<const ComplexVector>& y, const ComplexMatrix& h, double sigma2,
                      const SymbolBook& book)
{
    return CandidateProjection(h, book).app(y, sigma2);
}

Detection map_detect(const AppVector& app, const SymbolBook& book)
{
    require(app.size() == book.size(), "map_detect: APP length does not match the book");
    // max_element returns the first maximum, which is the tie-break rule.
    const auto it = std::max_element(app.probs.begin(), app.probs.end());
    const auto k = static_cast<std::size_t>(std::distance(app.probs.begin(), it));
    return {k, book.vector(k)};
}

ComplexVector expected_symbol(const AppVector& app, const SymbolBook& book)
{
    require(app.size() == book.size(), "expected_symbol: APP length does not match the book");
    const Eigen::Map<const RealVector> probs(app.probs.data(), static_cast<Eigen::Index>(app.size()));
    return book.vectors() * probs.cast<Complex>();
}

}  // namespace sdce
