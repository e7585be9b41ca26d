#include "sreval/text.hpp"

#include <algorithm>
#include <array>

namespace sreval {

namespace {

constexpr std::array<std::string_view, 16> kAbbreviations = {
    "dr.", "mr.", "mrs.", "ms.", "a.m.", "p.m.", "e.g.", "i.e.",
    "vs.", "approx.", "cf.", "etc.", "fig.", "st.", "no.", "pt.",
};

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
           (u >= 'A' && u <= 'Z');
}

char lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool ends_with_abbreviation(std::string_view text, std::size_t period) {
    std::size_t begin = period;
    while (begin > 0 && !is_space(text[begin - 1])) {
        --begin;
    }
    std::string word;
    for (std::size_t i = begin; i <= period; ++i) {
        word.push_back(lower(text[i]));
    }
    // Leading brackets or quotes do not belong to the abbreviation.
    while (!word.empty() && !is_word_char(word.front())) {
        word.erase(word.begin());
    }
    // "No." opens many report sentences; only treat it as an abbreviation
    // when a digit follows ("No. 2").
    if (word == "no.") {
        std::size_t next = period + 1;
        while (next < text.size() && is_space(text[next])) {
            ++next;
        }
        return next < text.size() && text[next] >= '0' && text[next] <= '9';
    }
    return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
           kAbbreviations.end();
}

}  // namespace

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> segment_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') {
            continue;
        }
        // Absorb runs such as "?!" or "...".
        std::size_t last = i;
        while (last + 1 < text.size() &&
               (text[last + 1] == '.' || text[last + 1] == '!' || text[last + 1] == '?')) {
            ++last;
        }
        const bool at_boundary = last + 1 == text.size() || is_space(text[last + 1]);
        if (!at_boundary) {
            i = last;
            continue;
        }
        if (c == '.' && last == i && ends_with_abbreviation(text, i)) {
            continue;
        }
        std::string sentence = collapse_whitespace(text.substr(start, last + 1 - start));
        if (!sentence.empty()) {
            sentences.push_back(std::move(sentence));
        }
        start = last + 1;
        i = last;
    }
    std::string tail = collapse_whitespace(text.substr(std::min(start, text.size())));
    if (!tail.empty()) {
        sentences.push_back(std::move(tail));
    }
    return sentences;
}

token_list tokenize(std::string_view text) {
    token_list tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (is_space(c)) {
            flush();
        } else if (is_word_char(c)) {
            current.push_back(lower(c));
        } else if (c == '-' && !current.empty() && i + 1 < text.size() &&
                   is_word_char(text[i + 1]) && is_word_char(text[i - 1])) {
            current.push_back(c);
        } else {
            flush();
            tokens.emplace_back(1, c);
        }
    }
    flush();
    return tokens;
}

std::string join_tokens(const token_list& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += t;
    }
    return out;
}

}  // namespace sreval
