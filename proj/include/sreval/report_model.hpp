/**
 * @file report_model.hpp
 * @brief Structured radiology report schema, vocabularies and validation.
 *
 * A structured report lists positive findings (a disease name with its
 * probability, severity level and anatomical location) followed by the names
 * of explicitly negated diseases. Every other component of the library
 * consumes these types.
 */

#ifndef SREVAL_REPORT_MODEL_HPP
#define SREVAL_REPORT_MODEL_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sreval {

// =============================================================================
// Canonical vocabularies
// =============================================================================

/**
 * @brief Diagnostic certainty on the closed scale {1, 2, 3}.
 *
 * 3 is an unhedged assertion, 1 the most tentative mention.
 */
class probability_score {
public:
    /// Throws std::invalid_argument unless value is 1, 2 or 3.
    explicit probability_score(int value);

    static std::optional<probability_score> from_int(long long value) noexcept;

    [[nodiscard]] int value() const noexcept { return value_; }

    friend bool operator==(probability_score, probability_score) = default;
    friend auto operator<=>(probability_score, probability_score) = default;

private:
    int value_;
};

enum class severity_level { unspecified, mild, moderate, severe };

/// Canonical lowercase spelling ("unspecified", "mild", ...).
[[nodiscard]] std::string_view to_string(severity_level level) noexcept;

/// Accepts the four canonical spellings, case-insensitively.
[[nodiscard]] std::optional<severity_level> parse_severity(std::string_view text) noexcept;

// =============================================================================
// Report types
// =============================================================================

struct positive_finding {
    std::string name;
    std::optional<probability_score> probability;
    severity_level level = severity_level::unspecified;
    std::optional<std::string> location;

    friend bool operator==(const positive_finding&, const positive_finding&) = default;
};

struct structured_report {
    std::vector<positive_finding> positives;
    std::vector<std::string> negatives;

    friend bool operator==(const structured_report&, const structured_report&) = default;
};

// =============================================================================
// Loosely typed input records
// =============================================================================

/**
 * @brief A finding as it arrives from an untrusted source.
 *
 * Values that would be unrepresentable in positive_finding (an out-of-range
 * probability, an unknown severity word) survive here so that validate() can
 * report them.
 */
struct raw_finding {
    std::optional<std::string> name;
    std::optional<long long> probability;
    std::optional<std::string> level;
    std::optional<std::string> location;
};

struct raw_report {
    std::optional<std::vector<raw_finding>> positives;
    /// An empty optional element stands for an entry that was not a string.
    std::optional<std::vector<std::optional<std::string>>> negatives;
};

// =============================================================================
// Validation
// =============================================================================

enum class issue_kind {
    missing_field,
    bad_enum,
    duplicate_name,
    empty_name,
    cross_list_conflict,
};

[[nodiscard]] std::string_view to_string(issue_kind kind) noexcept;

struct validation_issue {
    std::string path;  ///< e.g. "positives[1].probability", "negatives[0]"
    issue_kind kind;
    std::string message;

    friend bool operator==(const validation_issue&, const validation_issue&) = default;
};

/// Thrown by operations that require a valid report.
class schema_error : public std::runtime_error {
public:
    explicit schema_error(std::vector<validation_issue> issues);

    [[nodiscard]] const std::vector<validation_issue>& issues() const noexcept {
        return issues_;
    }

private:
    std::vector<validation_issue> issues_;
};

/**
 * @brief Lowercase, collapse internal whitespace, strip leading and trailing
 *        punctuation.
 *
 * Idempotent and never longer than its input. An empty result means the
 * name is unusable.
 */
[[nodiscard]] std::string normalize_name(std::string_view raw);

/// Every violation in the record, in document order. Empty iff valid.
[[nodiscard]] std::vector<validation_issue> validate(const raw_report& report);
[[nodiscard]] std::vector<validation_issue> validate(const structured_report& report);

/// Builds a typed report with normalized names; throws schema_error on issues.
[[nodiscard]] structured_report to_report(const raw_report& report);

/**
 * @brief Normalized names, positives and negatives sorted by name.
 *
 * Throws schema_error for reports that do not validate.
 */
[[nodiscard]] structured_report canonical_form(const structured_report& report);

}  // namespace sreval

#endif  // SREVAL_REPORT_MODEL_HPP
