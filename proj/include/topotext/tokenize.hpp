#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace topotext {

namespace detail {

// ASCII letters and digits are word characters; bytes outside ASCII are kept
// as-is so multi-byte UTF-8 sequences stay inside one token.
inline bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c >= 0x80;
}

inline char lower_ascii(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

} // namespace detail

// Lowercases and splits on maximal runs of non-alphanumeric characters.
// Empty input gives an empty sequence.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (detail::is_word_byte(c)) {
            current.push_back(detail::lower_ascii(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

} // namespace topotext
