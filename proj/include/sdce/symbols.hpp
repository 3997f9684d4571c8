#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdce/types.hpp"

namespace sdce {

enum class ConstellationKind { bpsk, qam4 };

ConstellationKind parse_constellation(const std::string& name);
std::string to_string(ConstellationKind kind);

/// Unit-average-power scalar constellation with Gray bit labels.
struct Constellation {
    ConstellationKind kind = ConstellationKind::qam4;
    std::vector<Complex> points;
    std::vector<unsigned> labels;
    unsigned bits_per_symbol = 0;

    std::size_t size() const { return points.size(); }
};

/// BPSK {+1, -1} or 4-QAM with labels 00, 01, 11, 10 assigned to the
/// quadrants counterclockwise from (1+i)/sqrt(2).
Constellation make_constellation(ConstellationKind kind);

/// Every candidate transmit vector x_k in X^{N_tx}, ordered lexicographically
/// with antenna 0 as the most significant digit.
class SymbolBook {
public:
    static constexpr std::size_t default_max_size = std::size_t{1} << 20;

    SymbolBook(Constellation constellation, int n_tx, std::size_t max_size = default_max_size);

    const Constellation& constellation() const { return constellation_; }
    int n_tx() const { return n_tx_; }
    std::size_t size() const { return static_cast<std::size_t>(vectors_.cols()); }

    /// Columns are the candidate vectors; column k is x_k.
    const ComplexMatrix& vectors() const { return vectors_; }
    ComplexVector vector(std::size_t k) const { return vectors_.col(static_cast<Eigen::Index>(k)); }

    /// Constellation index transmitted on antenna `antenna` for candidate k.
    std::size_t point_index(std::size_t k, int antenna) const;

private:
    Constellation constellation_;
    int n_tx_;
    ComplexMatrix vectors_;
};

SymbolBook enumerate_symbol_vectors(const Constellation& constellation, int n_tx,
                                    std::size_t max_size = SymbolBook::default_max_size);

}  // namespace sdce
