#pragma once

#include <string>

#include "mvksc/types.hpp"

namespace mvksc {

enum class KernelFamily { Linear, Polynomial };

/// Declaration of a feature-space map via its Gram function. Linear carries
/// no parameters; Polynomial needs offset c >= 0 and integer degree d >= 1.
struct KernelSpec {
    KernelFamily family = KernelFamily::Linear;
    double c = 0.0;
    int d = 1;

    static KernelSpec linear() { return {KernelFamily::Linear, 0.0, 1}; }
    static KernelSpec polynomial(double c, int d) { return {KernelFamily::Polynomial, c, d}; }

    void validate() const;
    std::string to_string() const;
};

/// Parse "linear" or "poly:<c>:<d>".
KernelSpec parse_kernel_spec(const std::string& text);

/// Gram matrix of the mapped samples: entries <x_i, x_j> for Linear,
/// (<x_i, x_j> + c)^d for Polynomial. Columns of `view` are samples.
/// Output is symmetrized exactly: K <- (K + K^T) / 2.
Matrix gram(const Matrix& view, const KernelSpec& spec);

}  // namespace mvksc
