#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace isee {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// State of the evolution equation in a truncated orthonormal eigenbasis:
// a plain coefficient vector of length d.
using SpectralState = Vector;

/// Thrown when a domain type or operation precondition is violated.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Largest singular value (operator 2-norm) of a dense matrix.
double spectral_norm(const Matrix& m);

}  // namespace isee
