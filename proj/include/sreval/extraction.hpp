/**
 * @file extraction.hpp
 * @brief Rule-based conversion of free-text findings into structured reports.
 *
 * Pipeline per sentence: disease mentions (longest lexicon match), negation
 * scope, hedge -> probability, nearest severity keyword, nearest location
 * phrase. Location phrases are then rewritten into a standard form through a
 * pluggable location_rewriter.
 */

#ifndef SREVAL_EXTRACTION_HPP
#define SREVAL_EXTRACTION_HPP

#include "sreval/lexicon.hpp"
#include "sreval/report_model.hpp"
#include "sreval/text.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace sreval {

// =============================================================================
// Location rewriting
// =============================================================================

/**
 * @brief Rewrites a raw location phrase into a standardized expression.
 *
 * Implementations used with a shared pipeline must be safe to call
 * concurrently; rewrite() may throw, in which case the phrase is kept as is.
 */
class location_rewriter {
public:
    virtual ~location_rewriter() = default;
    [[nodiscard]] virtual std::string rewrite(std::string_view phrase) const = 0;
};

class identity_rewriter final : public location_rewriter {
public:
    [[nodiscard]] std::string rewrite(std::string_view phrase) const override;
};

/**
 * @brief Deterministic pattern table. First matching rule wins; unmatched
 *        phrases come back unchanged.
 *
 * "lung right lower"  -> "in the lower zone of the right lung"
 * "left lower lobe"   -> "in the left lower lobe"
 */
class rule_rewriter final : public location_rewriter {
public:
    struct rule {
        std::string pattern;
        std::string format;  ///< std::regex_replace format ($1, $2, ...)
    };

    rule_rewriter();  ///< bundled table
    explicit rule_rewriter(std::vector<rule> rules);

    [[nodiscard]] std::string rewrite(std::string_view phrase) const override;

    static std::vector<rule> default_rules();

private:
    std::vector<std::pair<std::regex, std::string>> rules_;
};

/// rewriter.rewrite(phrase), falling back to phrase (with a warning) when it throws.
[[nodiscard]] std::string rephrase_location(std::string_view phrase,
                                            const location_rewriter& rewriter);

// =============================================================================
// Per-sentence steps
// =============================================================================

struct disease_mention {
    std::string name;
    token_span span;

    friend bool operator==(const disease_mention&, const disease_mention&) = default;
};

/// Token distance between two spans; adjacent spans are 1 apart, overlapping 0.
[[nodiscard]] std::size_t span_distance(token_span a, token_span b) noexcept;

[[nodiscard]] std::vector<disease_mention> find_disease_mentions(const token_list& sentence,
                                                                 const keyword_lexicon& lexicon);

/// Tokens that close the scope of a preceding negation cue.
[[nodiscard]] bool is_scope_breaker(std::string_view token) noexcept;

/**
 * @brief True iff a negation cue ends before span with no scope breaker
 *        (",", ";", "but", "however", "although") between cue and span.
 */
[[nodiscard]] bool detect_negation(const token_list& sentence, token_span span,
                                   const keyword_lexicon& lexicon);

/// Score of the hedge nearest to span (ties go to the preceding one); 3 if none.
[[nodiscard]] probability_score extract_probability(const token_list& sentence, token_span span,
                                                    const keyword_lexicon& lexicon);

inline constexpr std::size_t kDefaultSeverityWindow = 5;

/// Nearest severity keyword within window tokens; ties go to the preceding keyword.
[[nodiscard]] severity_level extract_severity(const token_list& sentence, token_span span,
                                              const keyword_lexicon& lexicon,
                                              std::size_t window = kDefaultSeverityWindow);

/**
 * @brief Raw location phrase for the mention at span.
 *
 * Every location phrase in the sentence attaches to its nearest disease
 * mention (ties go to the mention before the phrase); the mention receives
 * the longest phrase attached to it.
 */
[[nodiscard]] std::optional<std::string> extract_location(const token_list& sentence,
                                                          token_span span,
                                                          const keyword_lexicon& lexicon);

// =============================================================================
// Whole-report extraction
// =============================================================================

struct mention {
    std::string name;
    std::size_t sentence_index = 0;
    token_span span;
    bool negated = false;
    probability_score probability{3};
    severity_level level = severity_level::unspecified;
    std::optional<std::string> location;  ///< already rephrased
};

struct extraction_options {
    std::size_t severity_window = kDefaultSeverityWindow;
};

/// Every disease mention in text, in reading order.
[[nodiscard]] std::vector<mention> extract_mentions(std::string_view text,
                                                    const keyword_lexicon& lexicon,
                                                    const location_rewriter& rewriter,
                                                    const extraction_options& options = {});

/**
 * @brief Full pipeline; the result is in canonical form and always validates.
 *
 * Repeated mentions of one disease merge: an asserted reading beats a
 * negated one, a graded severity beats unspecified, a location beats none,
 * and the highest probability wins.
 */
[[nodiscard]] structured_report extract_report(std::string_view text,
                                               const keyword_lexicon& lexicon,
                                               const location_rewriter& rewriter,
                                               const extraction_options& options = {});

}  // namespace sreval

#endif  // SREVAL_EXTRACTION_HPP
