/**
 * @file text.hpp
 * @brief Deterministic sentence segmentation and tokenization.
 */

#ifndef SREVAL_TEXT_HPP
#define SREVAL_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace sreval {

using token_list = std::vector<std::string>;

/**
 * @brief Split text into sentences on '.', '!' or '?' followed by whitespace
 *        or end of input.
 *
 * A period that closes a known abbreviation ("dr.", "a.m.", "e.g.", ...)
 * does not end a sentence. Whitespace inside each sentence is collapsed to
 * single spaces; sentences keep their terminal punctuation.
 */
[[nodiscard]] std::vector<std::string> segment_sentences(std::string_view text);

/**
 * @brief Lowercase and split into word and punctuation tokens.
 *
 * Word characters are ASCII alphanumerics and any byte >= 0x80. A hyphen
 * between two word characters stays inside the word ("left-sided"); every
 * other non-space character is a token of its own.
 */
[[nodiscard]] token_list tokenize(std::string_view text);

/// Tokens joined with single spaces.
[[nodiscard]] std::string join_tokens(const token_list& tokens);

/// Trim and collapse runs of ASCII whitespace to one space.
[[nodiscard]] std::string collapse_whitespace(std::string_view text);

}  // namespace sreval

#endif  // SREVAL_TEXT_HPP
