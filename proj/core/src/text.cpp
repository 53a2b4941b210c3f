// SPDX-License-Identifier: Apache-2.0
#include "analogia/text.hpp"

#include <cstdint>

namespace analogia {

namespace {

bool is_ascii_punct(unsigned char c) {
    return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
           (c >= 0x7b && c <= 0x7e);
}

bool is_unicode_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0a: case 0x0b: case 0x0c: case 0x0d: case 0x20:
        case 0x85: case 0xa0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202f: case 0x205f: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200a;
    }
}

// Decodes one code point starting at s[i]; returns its byte length. Invalid
// sequences are consumed one byte at a time and never count as whitespace.
std::size_t decode(std::string_view s, std::size_t i, char32_t& cp) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xe ? 3 : (b0 >> 3) == 0x1e ? 4 : 1;
    if (i + len > s.size()) len = 1;
    if (len == 1) {
        cp = b0 < 0x80 ? b0 : 0xfffd;
        return 1;
    }
    cp = b0 & (0x7f >> len);
    for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3f);
    return len;
}

void flush(std::string& piece, TokenSeq& out) {
    std::size_t b = 0, e = piece.size();
    while (b < e && is_ascii_punct(static_cast<unsigned char>(piece[b]))) ++b;
    while (e > b && is_ascii_punct(static_cast<unsigned char>(piece[e - 1]))) --e;
    if (e > b) out.emplace_back(piece.substr(b, e - b));
    piece.clear();
}

}  // namespace

TokenSeq tokenize(std::string_view raw) {
    TokenSeq out;
    std::string piece;
    for (std::size_t i = 0; i < raw.size();) {
        char32_t cp = 0;
        const std::size_t len = decode(raw, i, cp);
        if (is_unicode_space(cp)) {
            flush(piece, out);
        } else if (len == 1 && cp < 0x80) {
            char c = raw[i];
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            piece.push_back(c);
        } else {
            piece.append(raw.substr(i, len));
        }
        i += len;
    }
    flush(piece, out);
    return out;
}

std::string join_tokens(const TokenSeq& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::string_view to_string(WhType type) noexcept {
    switch (type) {
        case WhType::Who: return "who";
        case WhType::When: return "when";
        case WhType::Where: return "where";
        case WhType::Other: return "other";
    }
    return "other";
}

std::optional<WhType> parse_wh_type(std::string_view name) {
    for (WhType t : {WhType::Who, WhType::When, WhType::Where, WhType::Other}) {
        if (tokenize(name) == TokenSeq{std::string(to_string(t))}) return t;
    }
    return std::nullopt;
}

WhType classify_question(const TokenSeq& tokens) {
    if (tokens.empty()) return WhType::Other;
    // Tokens are already lowercase; re-tokenizing also covers raw input.
    const TokenSeq first = tokenize(tokens.front());
    if (first.size() != 1) return WhType::Other;
    if (first[0] == "who") return WhType::Who;
    if (first[0] == "when") return WhType::When;
    if (first[0] == "where") return WhType::Where;
    return WhType::Other;
}

}  // namespace analogia
