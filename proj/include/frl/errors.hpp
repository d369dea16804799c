// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace frl {

// Maps to CLI exit code 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Maps to CLI exit code 2: factorization failures, overflow, divergent
// integrals, quadrature non-convergence.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what, double diagnostic = 0.0)
        : std::runtime_error(what), diagnostic(diagnostic) {}
    double diagnostic;
};

}  // namespace frl
