/**
 * @file corpus_io.hpp
 * @brief Line-delimited corpora, ref/hyp pairing, result files and corpus
 *        statistics.
 *
 * Corpus files hold one JSON object per line:
 *
 *     {"id": "s1", "text": "There is mild edema."}          free text
 *     {"id": "s1", "report": {"positive": [...], ...}}       structured
 *     {"id": "s1", "report": "<raw model output>"}          structured, repaired on read
 *
 * Ratings files: {"id": "s1", "rating": 4.5}
 */

#ifndef SREVAL_CORPUS_IO_HPP
#define SREVAL_CORPUS_IO_HPP

#include "sreval/correlation.hpp"
#include "sreval/json_codec.hpp"
#include "sreval/report_model.hpp"
#include "sreval/s_score.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sreval {

/// File cannot be opened, read or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fatal content problem: duplicate ids, or every line failed.
class corpus_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class record_kind { free_text, structured };

[[nodiscard]] std::string_view to_string(record_kind kind) noexcept;

struct corpus_record {
    std::string id;
    record_kind kind = record_kind::free_text;
    /// Raw text, or the canonical serialization of a structured report.
    std::string payload;
    /// Parsed report for structured records.
    std::optional<structured_report> report;
    /// Repair rules applied while reading a structured record.
    std::vector<repair_rule> repairs;
};

struct line_error {
    std::size_t line = 0;  ///< 1-based
    std::string message;
};

struct corpus_read_result {
    std::vector<corpus_record> records;  ///< file order
    std::vector<line_error> errors;
};

/**
 * @brief Read a .jsonl corpus.
 *
 * Blank lines are skipped. Malformed lines are collected in errors; a
 * duplicate id or a file where every line fails throws corpus_error, an
 * unreadable file throws io_error.
 */
[[nodiscard]] corpus_read_result read_corpus(const std::filesystem::path& path,
                                             record_kind expected_kind);

/// Same as read_corpus, from in-memory content.
[[nodiscard]] corpus_read_result parse_corpus(std::string_view content, record_kind expected_kind);

struct pairing {
    std::vector<std::pair<corpus_record, corpus_record>> paired;  ///< (ref, hyp), by id
    std::vector<std::string> missing_in_hyp;
    std::vector<std::string> missing_in_ref;
};

[[nodiscard]] pairing pair_by_id(const std::vector<corpus_record>& refs,
                                 const std::vector<corpus_record>& hyps);

// =============================================================================
// Results
// =============================================================================

/// Scoring configuration echoed into result summaries.
struct run_summary_config {
    detail_weights weights;
    bleu_config bleu;
    std::string lexicon_fingerprint;
    std::map<std::string, std::string> extra;  ///< free-form flags (input kinds, rewriter, ...)
};

/// Optional report-level n-gram scores computed on rendered sentences.
struct nlg_scores {
    double bleu1 = 0.0;
    double bleu2 = 0.0;
    double bleu3 = 0.0;
    double bleu4 = 0.0;
    double rouge_l = 0.0;
    double meteor = 0.0;
};

/// The sidecar summary path for a results file: "out.jsonl" -> "out.summary.json".
[[nodiscard]] std::filesystem::path summary_path_for(const std::filesystem::path& results);

/// One JSON line per report (no trailing newline).
[[nodiscard]] std::string result_line(const std::string& id, const score_breakdown& breakdown,
                                      const nlg_scores* nlg = nullptr);

[[nodiscard]] std::string summary_json(const corpus_evaluation& evaluation,
                                       const run_summary_config& config);

/**
 * @brief Write per-report lines to path and the summary next to it.
 *
 * nlg, when given, must be index-aligned with evaluation.reports.
 * Byte-deterministic for fixed inputs; throws io_error when unwritable.
 */
void write_results(const corpus_evaluation& evaluation, const run_summary_config& config,
                   const std::filesystem::path& path,
                   const std::vector<nlg_scores>* nlg = nullptr);

/**
 * @brief Read a results file back as metric vectors keyed by id.
 *
 * Every top-level numeric field becomes a metric; numeric fields of a
 * nested "nlg" object become "nlg.<name>".
 */
[[nodiscard]] std::map<std::string, std::map<std::string, double>> read_results(
    const std::filesystem::path& path);

[[nodiscard]] std::map<std::string, double> read_ratings(const std::filesystem::path& path);

/// Inner join of results and ratings; unmatched ids are returned in missing.
[[nodiscard]] std::vector<rated_sample> join_ratings(
    const std::map<std::string, std::map<std::string, double>>& results,
    const std::map<std::string, double>& ratings, std::vector<std::string>* missing = nullptr);

// =============================================================================
// Statistics
// =============================================================================

struct corpus_stats {
    std::size_t reports = 0;
    std::size_t positive_findings = 0;
    std::size_t negative_findings = 0;
    std::map<std::string, std::size_t> disease_frequency;  ///< positive findings per name
    std::array<std::size_t, 3> probability_histogram{};   ///< index p - 1
    std::size_t probability_absent = 0;
    std::map<severity_level, std::size_t> level_histogram;
    std::size_t located_findings = 0;

    /// located / positives, 0 when there are no positives.
    [[nodiscard]] double location_presence_rate() const noexcept;

    corpus_stats& operator+=(const corpus_stats& other);
    friend bool operator==(const corpus_stats&, const corpus_stats&) = default;
};

[[nodiscard]] corpus_stats compute_corpus_stats(const std::vector<structured_report>& reports);

[[nodiscard]] std::string stats_json(const corpus_stats& stats);

}  // namespace sreval

#endif  // SREVAL_CORPUS_IO_HPP
