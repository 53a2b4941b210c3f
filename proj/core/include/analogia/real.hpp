// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace analogia {

// Precision used for training, inference and checkpoints in memory.
// Gradient checks instantiate the numeric templates for double regardless.
#ifdef ANALOGIA_USE_DOUBLE
using Real = double;
#else
using Real = float;
#endif

}  // namespace analogia
