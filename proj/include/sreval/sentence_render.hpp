/**
 * @file sentence_render.hpp
 * @brief Template rendering of structured reports into sentence-style text.
 *
 *     positive: there <hedge> <verb> <level> <name> <location>.
 *     negative: no evidence of <name>.
 */

#ifndef SREVAL_SENTENCE_RENDER_HPP
#define SREVAL_SENTENCE_RENDER_HPP

#include "sreval/report_model.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

namespace sreval {

struct hedge_phrase {
    std::string hedge;  ///< may be empty
    std::string verb;

    friend bool operator==(const hedge_phrase&, const hedge_phrase&) = default;
};

/// Hedge and copula for each probability value; total over {1, 2, 3}.
class hedge_table {
public:
    /// might be / may be / is
    hedge_table();
    explicit hedge_table(std::array<hedge_phrase, 3> rows);

    [[nodiscard]] const hedge_phrase& at(probability_score p) const noexcept {
        return rows_[static_cast<std::size_t>(p.value() - 1)];
    }

    /// Reads the "hedge_render" object of a lexicon document; missing key -> default table.
    static hedge_table from_lexicon_json(std::string_view json_text);
    static hedge_table from_lexicon_file(const std::filesystem::path& path);

    friend bool operator==(const hedge_table&, const hedge_table&) = default;

private:
    std::array<hedge_phrase, 3> rows_;
};

/// A missing probability renders like probability 3.
[[nodiscard]] std::string render_positive(const positive_finding& finding,
                                          const hedge_table& table = {});

[[nodiscard]] std::string render_negative(std::string_view name);

/// Positives (by name) then negatives (by name), one sentence each, joined by single spaces.
[[nodiscard]] std::string render_report(const structured_report& report,
                                        const hedge_table& table = {});

}  // namespace sreval

#endif  // SREVAL_SENTENCE_RENDER_HPP
