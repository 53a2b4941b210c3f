// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

namespace analogia {

struct GradientSuiteConfig {
    std::size_t instances = 50;
    std::size_t max_steps = 3;
    std::size_t max_hidden = 3;
    std::size_t max_input = 3;
    std::uint64_t seed = 0;
    double tolerance_32 = 1e-4;
    double tolerance_64 = 1e-7;
};

struct GradientSuiteResult {
    std::size_t instances = 0;
    std::size_t coordinates = 0;
    double max_rel_error_32 = 0.0;
    double max_rel_error_64 = 0.0;
    std::size_t failures = 0;
    bool passed() const noexcept { return failures == 0; }
};

/// Finite-difference check of the whole training loss (four encodings,
/// shifts, energy, contrastive loss, L2 term) on small random instances.
/// Each instance is checked twice: a float reverse pass and a double reverse
/// pass, both against double central differences.
GradientSuiteResult run_gradient_suite(const GradientSuiteConfig& config);

}  // namespace analogia
