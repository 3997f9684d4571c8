#pragma once

#include <vector>

#include "sdce/mdp.hpp"
#include "sdce/policy.hpp"
#include "sdce/rng.hpp"

namespace sdce {

/// Random Hermitian positive definite matrix B B^H + floor I.
ComplexMatrix random_pd_matrix(int size, Rng& rng, double floor = 0.1);

/// A state with deliberately mismatched true/detected columns plus a slot-n
/// candidate and future virtual columns, for checking the closed-form reward
/// difference against the covariance oracle.
struct DeltaInstance {
    MdpState state;
    ComplexVector x_hat_n;
    ComplexVector x_tilde_n;
    std::vector<VirtualColumn> future;
};

DeltaInstance random_delta_instance(Rng& rng, int n_tx, int t_p, int prior_columns, int future_columns, double sigma2);

/// A receiver-side context from a random frame, and a state at a random slot
/// reached by random prior actions.
struct SelectionInstance {
    SelectionContext ctx;
    MdpState state;
    double ebn0_db = 0.0;
};

SelectionInstance random_selection_instance(const SymbolBook& book, Rng& rng, int n_rx, int t_p, int t_u,
                                            double ebn0_low_db, double ebn0_high_db);

/// |a - b| <= rel * max(|a|, |b|) + abs_floor.
bool close_relative(double a, double b, double rel, double abs_floor);

}  // namespace sdce
