// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "analogia/encoder.hpp"
#include "analogia/quadgen.hpp"
#include "analogia/real.hpp"

namespace analogia {

/// Flat key=value settings; lines starting with '#' are comments.
using KeyValues = std::map<std::string, std::string>;

std::string format_key_values(const KeyValues& kv);
KeyValues parse_key_values(const std::string& text, const std::string& source);

/// A trained encoder with everything needed to rank with it again.
///
/// On disk this is a directory with
///   manifest.txt   `name<TAB>shape<TAB>byte_offset` per tensor, shape as "rows,cols" or "n"
///   weights.bin    little-endian float32 values in manifest order
///   config.txt     key=value hyperparameters, embeddings path and dimensions
///   prototypes.tsv `wh_type<TAB>question_id<TAB>question<TAB>answer`
struct Checkpoint {
    EncoderParams<Real> params;
    KeyValues config;
    PrototypeSet prototypes;
};

/// Creates `dir` if needed and replaces the four files atomically one by one.
void save_checkpoint(const std::string& dir, const Checkpoint& checkpoint);

/// Throws ParseError / ConfigError on malformed or inconsistent files.
Checkpoint load_checkpoint(const std::string& dir);

}  // namespace analogia
