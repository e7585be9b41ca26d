/**
 * @file nlg_metrics.hpp
 * @brief Sentence-level n-gram metrics: BLEU, ROUGE-L and a simplified METEOR.
 */

#ifndef SREVAL_NLG_METRICS_HPP
#define SREVAL_NLG_METRICS_HPP

#include "sreval/text.hpp"

#include <cstddef>
#include <map>
#include <string_view>

namespace sreval {

using ngram_counts = std::map<token_list, std::size_t>;

/// All contiguous n-token windows with multiplicities. Requires n >= 1.
[[nodiscard]] ngram_counts ngrams(const token_list& tokens, std::size_t n);

enum class bleu_smoothing {
    none,
    add_one,  ///< (matches + 1) / (total + 1) for n >= 2
};

[[nodiscard]] std::string_view to_string(bleu_smoothing smoothing) noexcept;

struct bleu_config {
    int max_n = 4;  ///< 1..4
    bleu_smoothing smoothing = bleu_smoothing::add_one;
    /// Reduce the order to min(max_n, |hyp|, |ref|) so short phrases keep a
    /// defined score.
    bool clip_max_n_to_lengths = true;

    /// Defaults above; used for location phrases.
    static bleu_config location() { return {}; }
    /// Plain BLEU-n: no smoothing, no order clipping.
    static bleu_config standard(int n) { return {n, bleu_smoothing::none, false}; }

    /// Throws std::invalid_argument when max_n is outside 1..4.
    void check() const;

    friend bool operator==(const bleu_config&, const bleu_config&) = default;
};

/**
 * @brief Single-reference sentence BLEU.
 *
 * Geometric mean of clipped n-gram precisions times the brevity penalty
 * exp(1 - |ref|/|hyp|) for hypotheses shorter than the reference. Empty
 * hypothesis scores 0; an empty reference throws std::invalid_argument.
 */
[[nodiscard]] double bleu(const token_list& reference, const token_list& hypothesis,
                          const bleu_config& config = {});

inline constexpr double kRougeBeta = 1.2;

/// Length of the longest common subsequence.
[[nodiscard]] std::size_t lcs_length(const token_list& a, const token_list& b);

/**
 * @brief LCS F-measure with recall weight beta = 1.2.
 *
 * Both empty -> 1, exactly one empty -> 0.
 */
[[nodiscard]] double rouge_l(const token_list& reference, const token_list& hypothesis);

/**
 * @brief METEOR without stemming or synonyms.
 *
 * Greedy left-to-right exact unigram alignment, Fmean = 10PR / (R + 9P),
 * penalty 0.5 * (chunks / matches)^3.
 */
[[nodiscard]] double meteor_lite(const token_list& reference, const token_list& hypothesis);

}  // namespace sreval

#endif  // SREVAL_NLG_METRICS_HPP
