/**
 * @file json_codec.hpp
 * @brief Strict and repairing parsers for structured reports, and the
 *        canonical serializer.
 *
 * Interchange format (UTF-8 JSON):
 *
 *     {"positive":[{"name":"edema","probability":2,"level":"mild",
 *                   "location":"in the left lung"}],
 *      "negative":["pneumonia"]}
 */

#ifndef SREVAL_JSON_CODEC_HPP
#define SREVAL_JSON_CODEC_HPP

#include "sreval/report_model.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sreval {

// =============================================================================
// Repair
// =============================================================================

/// Repair rules, in the order they are applied.
enum class repair_rule {
    strip_wrapper,     ///< code fences and prose around the outermost object
    single_quotes,     ///< 'text' -> "text"
    bare_keys,         ///< {name: ...} -> {"name": ...}
    trailing_commas,   ///< [1, 2,] -> [1, 2]
    balance_brackets,  ///< close strings, arrays and objects left open at end of input
    drop_truncated,    ///< remove an incomplete final element before balancing
};

[[nodiscard]] std::string_view to_string(repair_rule rule) noexcept;

struct repair_log {
    std::vector<repair_rule> applied;
    std::size_t original_length = 0;
    std::size_t repaired_length = 0;
    /// Set when the rules could not produce a JSON object; the text is then
    /// returned unchanged.
    bool exhausted = false;
};

/**
 * @brief Normalize malformed model output into a JSON object.
 *
 * Text that already parses as a JSON object is returned byte-for-byte with
 * an empty log. Otherwise the rules run in enum order. If the result still
 * is not a JSON object the original text is returned with exhausted set, so
 * repair(repair(t).first).first == repair(t).first always holds.
 */
[[nodiscard]] std::pair<std::string, repair_log> repair(std::string_view text);

// =============================================================================
// Parsing
// =============================================================================

class codec_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed JSON. offset is the zero-based byte offset of the offending character.
class syntax_error : public codec_error {
public:
    syntax_error(const std::string& message, std::size_t offset);
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Well-formed JSON that does not describe a valid report.
class report_schema_error : public codec_error {
public:
    explicit report_schema_error(std::vector<validation_issue> issues);
    [[nodiscard]] const std::vector<validation_issue>& issues() const noexcept {
        return issues_;
    }

private:
    std::vector<validation_issue> issues_;
};

/// Lenient parse gave up: the repaired text is still not a JSON object.
class unparseable_error : public codec_error {
public:
    explicit unparseable_error(repair_log log);
    [[nodiscard]] const repair_log& log() const noexcept { return log_; }

private:
    repair_log log_;
};

/**
 * @brief Parse a complete report object.
 *
 * Unknown keys are ignored and numeric strings such as "2" are coerced for
 * probability; both emit a warning through the log sink. Invalid UTF-8 is
 * replaced with U+FFFD before parsing. Names are normalized. A missing
 * "positive" or "negative" list reads as empty, but at least one must be
 * present.
 */
[[nodiscard]] structured_report parse_strict(std::string_view text);

struct lenient_result {
    structured_report report;
    repair_log log;
};

/// parse_strict(repair(text).first) with the repair log attached.
[[nodiscard]] lenient_result parse_lenient(std::string_view text);

/**
 * @brief Canonical compact serialization.
 *
 * Keys in schema order, positives and negatives sorted by name, absent
 * optional fields omitted, level always written. Throws schema_error for
 * invalid reports.
 */
[[nodiscard]] std::string serialize(const structured_report& report);

/// True iff text parses as a JSON object (no schema check).
[[nodiscard]] bool is_json_object(std::string_view text);

/// Replace invalid UTF-8 sequences with U+FFFD. Returns the replacement count.
std::size_t sanitize_utf8(std::string& text);

}  // namespace sreval

#endif  // SREVAL_JSON_CODEC_HPP
