/**
 * @file lexicon.hpp
 * @brief Keyword lists that drive rule-based extraction.
 *
 * Lexicon file (UTF-8 JSON):
 *
 *     {
 *       "diseases":      [{"canonical": "pleural effusion",
 *                          "synonyms": ["pleural effusion", "effusion"]}],
 *       "hedges":        {"might": 1, "likely": 2},
 *       "severities":    {"minimal": "mild", "marked": "severe"},
 *       "locations":     ["left lower lobe"],
 *       "negation_cues": ["no", "without"],
 *       "hedge_render":  {"1": {"hedge": "might", "verb": "be"}, ...}
 *     }
 *
 * "hedge_render" is read by sentence_render and ignored here.
 */

#ifndef SREVAL_LEXICON_HPP
#define SREVAL_LEXICON_HPP

#include "sreval/report_model.hpp"
#include "sreval/text.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sreval {

class lexicon_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Half-open token range [begin, end).
struct token_span {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const token_span&, const token_span&) = default;
};

/**
 * @brief Multi-token phrase dictionary with longest-match-first lookup.
 *
 * Each phrase carries an integer payload chosen by the owner.
 */
class phrase_table {
public:
    struct match {
        token_span span;
        int payload = 0;
    };

    void add(const token_list& phrase, int payload);

    /// Longest phrase starting exactly at tokens[pos], if any.
    [[nodiscard]] std::optional<match> longest_at(const token_list& tokens, std::size_t pos) const;

    /// Left-to-right scan, longest match first, non-overlapping.
    [[nodiscard]] std::vector<match> scan(const token_list& tokens) const;

    [[nodiscard]] bool empty() const noexcept { return by_first_.empty(); }

private:
    struct entry {
        token_list phrase;
        int payload;
    };
    // Keyed by first token; each bucket is sorted longest phrase first.
    std::map<std::string, std::vector<entry>, std::less<>> by_first_;
};

struct disease_entry {
    std::string canonical;
    std::vector<std::string> synonyms;
};

/// Plain contents of a lexicon file, before validation.
struct lexicon_data {
    std::vector<disease_entry> diseases;
    std::map<std::string, int> hedges;
    std::map<std::string, std::string> severities;
    std::vector<std::string> locations;
    std::vector<std::string> negation_cues;
};

/**
 * @brief Validated, immutable lexicon with prebuilt phrase tables.
 *
 * Invariants: every surface form is lowercase and unique within its list
 * (disease synonyms are unique across all diseases), every hedge maps into
 * {1, 2, 3}, every severity maps to a canonical level, and the disease list
 * is non-empty. A canonical disease name is always matchable, even when it
 * is not repeated among its synonyms.
 */
class keyword_lexicon {
public:
    /// Throws lexicon_error when an invariant is violated.
    explicit keyword_lexicon(lexicon_data data);

    static keyword_lexicon from_json(std::string_view json_text);
    static keyword_lexicon from_file(const std::filesystem::path& path);

    /// The bundled default lexicon (data/default_lexicon.json).
    static const keyword_lexicon& default_lexicon();
    static std::string_view default_lexicon_json();

    [[nodiscard]] const lexicon_data& data() const noexcept { return data_; }

    [[nodiscard]] const phrase_table& diseases() const noexcept { return diseases_; }
    [[nodiscard]] const phrase_table& hedges() const noexcept { return hedges_; }
    [[nodiscard]] const phrase_table& severities() const noexcept { return severities_; }
    [[nodiscard]] const phrase_table& locations() const noexcept { return locations_; }
    [[nodiscard]] const phrase_table& negation_cues() const noexcept { return negation_cues_; }

    /// Canonical disease name for a payload returned by diseases().
    [[nodiscard]] const std::string& disease_name(int payload) const;
    [[nodiscard]] severity_level severity(int payload) const;
    [[nodiscard]] probability_score hedge_score(int payload) const;

    /// Compact JSON with sorted keys; stable across loads of equal content.
    [[nodiscard]] std::string to_canonical_json() const;

    /// FNV-1a 64-bit hash of to_canonical_json(), as 16 hex digits.
    [[nodiscard]] std::string fingerprint() const;

private:
    lexicon_data data_;
    std::vector<severity_level> severity_values_;
    std::vector<int> hedge_values_;
    phrase_table diseases_;
    phrase_table hedges_;
    phrase_table severities_;
    phrase_table locations_;
    phrase_table negation_cues_;
};

}  // namespace sreval

#endif  // SREVAL_LEXICON_HPP
