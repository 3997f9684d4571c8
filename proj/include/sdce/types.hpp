#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sdce {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when an argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical invariant is broken beyond its stated tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw InvalidArgument(message);
    }
}

/// Real part of a trace whose exact value is real; the imaginary residue must
/// stay below 1e-9 relative to the magnitude.
double real_trace(const ComplexMatrix& m);

/// Real part of a scalar that is real in exact arithmetic, same residue check.
double real_part_checked(Complex value);

bool all_finite(const ComplexMatrix& m);

}  // namespace sdce
