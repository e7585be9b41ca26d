/**
 * @file s_score.hpp
 * @brief Structured-report score: disease prediction (P-Score), detail
 *        precision (D-Score) and their mean (S-Score).
 *
 * P-Score averages set-F1 over positive names and set-F1 over negative
 * names. D-Score averages, over the union of positive names, a weighted sum
 * of probability, severity and location agreement that only counts when the
 * name appears in both reports. S-Score = (P-Score + D-Score) / 2.
 */

#ifndef SREVAL_S_SCORE_HPP
#define SREVAL_S_SCORE_HPP

#include "sreval/nlg_metrics.hpp"
#include "sreval/report_model.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sreval {

/// Non-negative weights summing to 1 (within 1e-9).
struct detail_weights {
    double probability = 1.0 / 3.0;
    double level = 1.0 / 3.0;
    double location = 1.0 / 3.0;

    /// Throws std::invalid_argument when the invariant does not hold.
    void check() const;

    friend bool operator==(const detail_weights&, const detail_weights&) = default;
};

struct finding_score {
    std::string name;
    bool matched = false;
    double s_prob = 0.0;
    double s_level = 0.0;
    double s_loc = 0.0;

    friend bool operator==(const finding_score&, const finding_score&) = default;
};

struct score_breakdown {
    double p_score_pos = 0.0;
    double p_score_neg = 0.0;
    double p_score = 0.0;
    double d_score = 0.0;
    double s_score = 0.0;
    std::vector<finding_score> per_finding;  ///< one row per name in the positive union, sorted

    friend bool operator==(const score_breakdown&, const score_breakdown&) = default;
};

struct p_score_result {
    double pos = 0.0;
    double neg = 0.0;
    double combined = 0.0;
};

/**
 * @brief F1 of reference/hypothesis membership over their union.
 *
 * Both empty -> 1; exactly one empty -> 0.
 */
[[nodiscard]] double set_f1(const std::set<std::string>& reference,
                            const std::set<std::string>& hypothesis);

[[nodiscard]] p_score_result p_score(const structured_report& reference,
                                     const structured_report& hypothesis);

/**
 * @brief 1 - (u(ref) - u(hyp))^2 with u mapping {1, 2, 3} onto {0, 1/2, 1}.
 *
 * A missing hypothesis probability scores 0. A missing reference
 * probability is read as 3.
 */
[[nodiscard]] double s_prob(std::optional<probability_score> reference,
                            std::optional<probability_score> hypothesis);

[[nodiscard]] double s_level(severity_level reference, severity_level hypothesis);

/**
 * @brief BLEU of tokenized location phrases.
 *
 * Both absent -> 1; hypothesis absent -> 0; reference absent with a
 * hypothesis -> 0.
 */
[[nodiscard]] double s_loc(const std::optional<std::string>& reference,
                           const std::optional<std::string>& hypothesis,
                           const bleu_config& config = bleu_config::location());

struct d_score_result {
    double score = 1.0;
    std::vector<finding_score> per_finding;
};

/// Mean gated detail score over the union of positive names; 1 when that union is empty.
[[nodiscard]] d_score_result d_score(const structured_report& reference,
                                     const structured_report& hypothesis,
                                     const detail_weights& weights = {},
                                     const bleu_config& config = bleu_config::location());

[[nodiscard]] score_breakdown s_score(const structured_report& reference,
                                      const structured_report& hypothesis,
                                      const detail_weights& weights = {},
                                      const bleu_config& config = bleu_config::location());

// =============================================================================
// Corpus evaluation
// =============================================================================

struct report_pair {
    std::string id;
    structured_report reference;
    structured_report hypothesis;
};

struct corpus_means {
    double p_score_pos = 0.0;
    double p_score_neg = 0.0;
    double p_score = 0.0;
    double d_score = 0.0;
    double s_score = 0.0;
};

struct corpus_evaluation {
    /// Sorted by id.
    std::vector<std::pair<std::string, score_breakdown>> reports;
    /// Empty for an empty corpus.
    std::optional<corpus_means> means;
};

/**
 * @brief Score every pair and average each metric.
 *
 * Results are ordered by id and summed in that order, so the output does
 * not depend on input order. Throws std::invalid_argument on duplicate ids.
 */
[[nodiscard]] corpus_evaluation evaluate_corpus(std::vector<report_pair> pairs,
                                                const detail_weights& weights = {},
                                                const bleu_config& config = bleu_config::location());

}  // namespace sreval

#endif  // SREVAL_S_SCORE_HPP
