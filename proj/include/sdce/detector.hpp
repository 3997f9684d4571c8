#pragma once

#include <cstddef>
#include <vector>

#include "sdce/symbols.hpp"
#include "sdce/types.hpp"

namespace sdce {

enum class AppSource { true_channel, pilot_estimate, tree_refined, final_estimate };

/// A-posteriori probabilities over the K candidates of a symbol book for one
/// data slot.
struct AppVector {
    std::vector<double> probs;
    int slot = 0;
    AppSource source = AppSource::pilot_estimate;

    std::size_t size() const { return probs.size(); }
    double operator[](std::size_t k) const { return probs[k]; }
};

/// H x_k for every candidate of a book, computed once per channel (estimate)
/// and reused for every slot detected with it.
class CandidateProjection {
public:
    CandidateProjection(const ComplexMatrix& h, const SymbolBook& book);

    /// probs_k ~ exp(-|y - H x_k|^2 / sigma2), normalised after subtracting the largest exponent.
    AppVector app(const Eigen::Ref<const ComplexVector>& y, double sigma2, int slot = 0,
                  AppSource source = AppSource::pilot_estimate) const;

private:
    ComplexMatrix projected_;
};

AppVector compute_app(const Eigen::Ref<const ComplexVector>& y, const ComplexMatrix& h, double sigma2,
                      const SymbolBook& book);

struct Detection {
    std::size_t index = 0;
    ComplexVector vector;
};

/// Argmax of the APPs; the lowest index wins exact ties.
Detection map_detect(const AppVector& app, const SymbolBook& book);

/// Soft symbol sum_k probs_k x_k.
ComplexVector expected_symbol(const AppVector& app, const SymbolBook& book);

}  // namespace sdce
