#include "sdce/rng.hpp"

#include <cmath>

namespace sdce {

double real_trace(const ComplexMatrix& m)
{
    return real_part_checked(m.trace());
}

double real_part_checked(Complex value)
{
    const double magnitude = std::abs(value);
    // Absolute floor covers values that are zero up to rounding.
    if (std::abs(value.imag()) > 1e-9 * magnitude + 1e-14) {
        throw NumericalError("imaginary residue in a real-valued quantity: " + std::to_string(value.imag()));
    }
    return value.real();
}

bool all_finite(const ComplexMatrix& m)
{
    return m.allFinite();
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng make_rng(const StreamKey& stream_key, StreamPurpose purpose)
{
    const std::uint64_t a = splitmix64(stream_key.master_seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(stream_key.stream_id + 0x632be59bd9b4e019ULL));
    const std::uint64_t c = splitmix64(b ^ static_cast<std::uint64_t>(purpose));
    std::seed_seq seq{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

Complex complex_normal(Rng& rng)
{
    static const double scale = std::sqrt(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double re = normal(rng);
    const double im = normal(rng);
    return {scale * re, scale * im};
}

ComplexMatrix complex_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    ComplexMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            m(r, c) = complex_normal(rng);
        }
    }
    return m;
}

}  // namespace sdce
