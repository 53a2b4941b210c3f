// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace analogia {

using Token = std::string;
using TokenSeq = std::vector<Token>;

/// Lowercases ASCII letters, splits on Unicode whitespace, strips leading and
/// trailing ASCII punctuation from each piece and drops what becomes empty.
/// Non-ASCII bytes are kept as they are.
TokenSeq tokenize(std::string_view raw);

std::string join_tokens(const TokenSeq& tokens);

enum class WhType { Who, When, Where, Other };

inline constexpr WhType kQuadrupleTypes[] = {WhType::Who, WhType::When, WhType::Where};

/// "who", "when", "where", "other"
std::string_view to_string(WhType type) noexcept;
std::optional<WhType> parse_wh_type(std::string_view name);

/// Who/When/Where when the first token is that wh-word, Other otherwise.
WhType classify_question(const TokenSeq& tokens);

}  // namespace analogia
