#include "sreval/json_codec.hpp"

#include "sreval/log.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>

namespace sreval {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(repair_rule rule) noexcept {
    switch (rule) {
        case repair_rule::strip_wrapper: return "strip-wrapper";
        case repair_rule::single_quotes: return "single-quotes";
        case repair_rule::bare_keys: return "bare-keys";
        case repair_rule::trailing_commas: return "trailing-commas";
        case repair_rule::balance_brackets: return "balance-brackets";
        case repair_rule::drop_truncated: return "drop-truncated";
    }
    return "unknown";
}

syntax_error::syntax_error(const std::string& message, std::size_t offset)
    : codec_error(message), offset_(offset) {}

report_schema_error::report_schema_error(std::vector<validation_issue> issues)
    : codec_error(schema_error(issues).what()), issues_(std::move(issues)) {}

unparseable_error::unparseable_error(repair_log log)
    : codec_error("output could not be repaired into a JSON object"), log_(std::move(log)) {}

// =============================================================================
// UTF-8
// =============================================================================

std::size_t sanitize_utf8(std::string& text) {
    static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
    std::string out;
    std::size_t replaced = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
    auto cont = [&](std::size_t k) { return k < n && (byte(k) & 0xC0) == 0x80; };

    while (i < n) {
        const unsigned char c = byte(i);
        std::size_t len = 0;
        if (c < 0x80) {
            len = 1;
        } else if (c >= 0xC2 && c <= 0xDF) {
            len = cont(i + 1) ? 2 : 0;
        } else if (c >= 0xE0 && c <= 0xEF) {
            if (cont(i + 1) && cont(i + 2)) {
                const unsigned char c1 = byte(i + 1);
                const bool overlong = c == 0xE0 && c1 < 0xA0;
                const bool surrogate = c == 0xED && c1 >= 0xA0;
                len = (overlong || surrogate) ? 0 : 3;
            }
        } else if (c >= 0xF0 && c <= 0xF4) {
            if (cont(i + 1) && cont(i + 2) && cont(i + 3)) {
                const unsigned char c1 = byte(i + 1);
                const bool overlong = c == 0xF0 && c1 < 0x90;
                const bool too_big = c == 0xF4 && c1 >= 0x90;
                len = (overlong || too_big) ? 0 : 4;
            }
        }
        if (len == 0) {
            if (replaced == 0) {
                out.assign(text, 0, i);
            }
            out += kReplacement;
            ++replaced;
            ++i;
            continue;
        }
        if (replaced != 0) {
            out.append(text, i, len);
        }
        i += len;
    }
    if (replaced != 0) {
        text = std::move(out);
    }
    return replaced;
}

bool is_json_object(std::string_view text) {
    std::string copy(text);
    sanitize_utf8(copy);
    const json parsed = json::parse(copy, nullptr, /*allow_exceptions=*/false);
    return parsed.is_object();
}

// =============================================================================
// Repair rules
// =============================================================================

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9') || c == '-';
}

std::size_t skip_space(std::string_view s, std::size_t i) {
    while (i < s.size() && is_space(s[i])) {
        ++i;
    }
    return i;
}

// Copies a double-quoted string starting at s[i] == '"' into out and returns
// the index one past its closing quote (or s.size() when unterminated).
std::size_t copy_string(std::string_view s, std::size_t i, std::string& out) {
    out.push_back(s[i++]);
    while (i < s.size()) {
        const char c = s[i];
        out.push_back(c);
        ++i;
        if (c == '\\' && i < s.size()) {
            out.push_back(s[i++]);
        } else if (c == '"') {
            break;
        }
    }
    return i;
}

// Index one past the brace closing the object opened at s[first], or npos
// when the input ends first.
std::size_t matching_close(std::string_view s, std::size_t first) {
    int depth = 0;
    char quote = 0;
    bool escaped = false;
    for (std::size_t i = first; i < s.size(); ++i) {
        const char c = s[i];
        if (quote != 0) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == quote) {
                quote = 0;
            }
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}' && --depth == 0) {
            return i + 1;
        }
    }
    return std::string_view::npos;
}

// Truncated input keeps everything after the first '{' except a closing fence.
std::string strip_wrapper(std::string_view s) {
    const std::size_t first = s.find('{');
    if (first == std::string_view::npos) {
        return std::string(s);
    }
    const std::size_t end = matching_close(s, first);
    if (end != std::string_view::npos) {
        return std::string(s.substr(first, end - first));
    }
    std::string_view rest = s.substr(first);
    while (!rest.empty() && is_space(rest.back())) {
        rest.remove_suffix(1);
    }
    if (rest.size() >= 3 && rest.substr(rest.size() - 3) == "```") {
        rest.remove_suffix(3);
    }
    return std::string(rest);
}

std::string convert_single_quotes(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 8);
    char prev = '\0';  // last significant character emitted outside strings
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '"') {
            i = copy_string(s, i, out);
            prev = '"';
            continue;
        }
        const bool token_start = prev == '\0' || prev == '{' || prev == '[' ||
                                 prev == ',' || prev == ':';
        if (c == '\'' && token_start) {
            out.push_back('"');
            ++i;
            while (i < s.size()) {
                const char d = s[i];
                if (d == '\\' && i + 1 < s.size()) {
                    if (s[i + 1] == '\'') {
                        out.push_back('\'');
                    } else {
                        out.push_back(d);
                        out.push_back(s[i + 1]);
                    }
                    i += 2;
                    continue;
                }
                if (d == '\'') {
                    const std::size_t next = skip_space(s, i + 1);
                    if (next == s.size() || s[next] == ',' || s[next] == ':' ||
                        s[next] == '}' || s[next] == ']') {
                        out.push_back('"');
                        ++i;
                        break;
                    }
                }
                if (d == '"') {
                    out += "\\\"";
                } else {
                    out.push_back(d);
                }
                ++i;
            }
            // An unterminated string is closed later by balancing.
            prev = '"';
            continue;
        }
        out.push_back(c);
        if (!is_space(c)) {
            prev = c;
        }
        ++i;
    }
    return out;
}

std::string quote_bare_keys(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 16);
    char prev = '\0';
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '"') {
            i = copy_string(s, i, out);
            prev = '"';
            continue;
        }
        if ((prev == '{' || prev == ',') && is_ident_start(c)) {
            std::size_t end = i;
            while (end < s.size() && is_ident_char(s[end])) {
                ++end;
            }
            const std::size_t colon = skip_space(s, end);
            if (colon < s.size() && s[colon] == ':') {
                out.push_back('"');
                out.append(s.substr(i, end - i));
                out.push_back('"');
                prev = '"';
                i = end;
                continue;
            }
        }
        out.push_back(c);
        if (!is_space(c)) {
            prev = c;
        }
        ++i;
    }
    return out;
}

std::string remove_trailing_commas(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '"') {
            i = copy_string(s, i, out);
            continue;
        }
        if (c == ',') {
            const std::size_t next = skip_space(s, i + 1);
            if (next < s.size() && (s[next] == '}' || s[next] == ']')) {
                ++i;
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

std::string balance(std::string_view s) {
    std::string out(s);
    std::vector<char> open;
    bool in_string = false;
    bool escaped = false;
    for (char c : s) {
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        switch (c) {
            case '"': in_string = true; break;
            case '{': open.push_back('}'); break;
            case '[': open.push_back(']'); break;
            case '}':
            case ']':
                if (!open.empty() && open.back() == c) {
                    open.pop_back();
                }
                break;
            default: break;
        }
    }
    if (in_string) {
        if (escaped) {
            out.pop_back();
        }
        out.push_back('"');
    }
    for (auto it = open.rbegin(); it != open.rend(); ++it) {
        out.push_back(*it);
    }
    return out;
}

// Cuts the last element of the innermost open container: everything from
// the final structural ',' on, or everything after the final '{' / '['.
// Returns nullopt when no cut shortens the text.
std::optional<std::string> cut_last_element(std::string_view s) {
    std::vector<std::size_t> structural;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == ',' || c == '{' || c == '[') {
            structural.push_back(i);
        }
    }
    for (auto it = structural.rbegin(); it != structural.rend(); ++it) {
        const std::size_t keep = s[*it] == ',' ? *it : *it + 1;
        std::size_t end = keep;
        while (end > 0 && is_space(s[end - 1])) {
            --end;
        }
        if (end < s.size()) {
            return std::string(s.substr(0, end));
        }
    }
    return std::nullopt;
}

// A string cut off by the end of input is the truncated element itself.
bool ends_inside_string(std::string_view s) {
    bool in_string = false;
    bool escaped = false;
    for (char c : s) {
        if (escaped) {
            escaped = false;
        } else if (in_string && c == '\\') {
            escaped = true;
        } else if (c == '"') {
            in_string = !in_string;
        }
    }
    return in_string;
}

constexpr int kMaxDrops = 64;

}  // namespace

std::pair<std::string, repair_log> repair(std::string_view text) {
    repair_log log;
    log.original_length = text.size();
    log.repaired_length = text.size();
    if (is_json_object(text)) {
        return {std::string(text), log};
    }

    std::string current(text);
    auto apply = [&](repair_rule rule, std::string next) {
        if (next != current) {
            log.applied.push_back(rule);
            current = std::move(next);
        }
    };
    apply(repair_rule::strip_wrapper, strip_wrapper(current));
    apply(repair_rule::single_quotes, convert_single_quotes(current));
    apply(repair_rule::bare_keys, quote_bare_keys(current));
    apply(repair_rule::trailing_commas, remove_trailing_commas(current));

    std::string balanced = ends_inside_string(current) ? current : balance(current);
    bool balanced_changed = balanced != current;
    bool dropped = false;
    if (!is_json_object(balanced)) {
        std::string truncated = current;
        for (int attempt = 0; attempt < kMaxDrops; ++attempt) {
            auto cut = cut_last_element(truncated);
            if (!cut) {
                break;
            }
            truncated = std::move(*cut);
            // An object left with no complete member is itself truncated.
            if (truncated.size() > 1 && truncated.back() == '{') {
                continue;
            }
            std::string candidate = balance(truncated);
            if (is_json_object(candidate)) {
                dropped = true;
                balanced_changed = candidate != truncated;
                balanced = std::move(candidate);
                break;
            }
        }
    }
    if (balanced_changed) {
        log.applied.push_back(repair_rule::balance_brackets);
    }
    if (dropped) {
        log.applied.push_back(repair_rule::drop_truncated);
    }

    if (!is_json_object(balanced)) {
        log.exhausted = true;
        return {std::string(text), log};
    }
    log.repaired_length = balanced.size();
    return {std::move(balanced), log};
}

// =============================================================================
// Parsing
// =============================================================================

namespace {

std::string finding_path(std::size_t index, std::string_view field) {
    return "positives[" + std::to_string(index) + "]." + std::string(field);
}

std::optional<long long> coerce_probability(const json& value, const std::string& path,
                                            std::vector<validation_issue>& issues) {
    if (value.is_number_integer()) {
        return value.get<long long>();
    }
    if (value.is_number_float()) {
        const double d = value.get<double>();
        if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) < 1e15) {
            log_warning("coerced non-integer number at " + path);
            return static_cast<long long>(d);
        }
    } else if (value.is_string()) {
        const std::string& s = value.get_ref<const std::string&>();
        std::size_t begin = 0;
        std::size_t end = s.size();
        while (begin < end && is_space(s[begin])) {
            ++begin;
        }
        while (end > begin && is_space(s[end - 1])) {
            --end;
        }
        long long parsed = 0;
        const char* first = s.data() + begin;
        const char* last = s.data() + end;
        const auto [ptr, ec] = std::from_chars(first, last, parsed);
        if (begin < end && ec == std::errc() && ptr == last) {
            log_warning("coerced string \"" + s + "\" to a number at " + path);
            return parsed;
        }
    }
    issues.push_back({path, issue_kind::bad_enum,
                      "probability must be an integer, got " + value.dump()});
    return std::nullopt;
}

raw_finding read_finding(const json& node, std::size_t index,
                         std::vector<validation_issue>& issues) {
    raw_finding finding;
    for (const auto& [key, value] : node.items()) {
        const std::string path = finding_path(index, key);
        if (key == "name") {
            if (value.is_string()) {
                finding.name = value.get<std::string>();
            } else if (!value.is_null()) {
                issues.push_back({path, issue_kind::bad_enum, "name must be a string"});
            }
        } else if (key == "probability") {
            if (!value.is_null()) {
                finding.probability = coerce_probability(value, path, issues);
            }
        } else if (key == "level") {
            if (value.is_string()) {
                finding.level = value.get<std::string>();
            } else if (!value.is_null()) {
                issues.push_back({path, issue_kind::bad_enum, "level must be a string"});
            }
        } else if (key == "location") {
            if (value.is_string()) {
                finding.location = value.get<std::string>();
            } else if (!value.is_null()) {
                issues.push_back({path, issue_kind::bad_enum, "location must be a string"});
            }
        } else {
            log_warning("ignoring unknown key '" + key + "' in positives[" +
                        std::to_string(index) + "]");
        }
    }
    return finding;
}

}  // namespace

structured_report parse_strict(std::string_view text) {
    std::string input(text);
    if (const std::size_t replaced = sanitize_utf8(input); replaced != 0) {
        log_warning("replaced " + std::to_string(replaced) + " invalid UTF-8 byte(s)");
    }

    json doc;
    try {
        doc = json::parse(input);
    } catch (const json::parse_error& e) {
        // nlohmann reports the 1-based index of the last byte it read.
        const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
        throw syntax_error(e.what(), offset);
    }

    std::vector<validation_issue> issues;
    if (!doc.is_object()) {
        issues.push_back({"$", issue_kind::missing_field, "top-level value is not an object"});
        throw report_schema_error(std::move(issues));
    }

    raw_report raw;
    std::vector<std::string> non_object_prefixes;
    for (const auto& [key, value] : doc.items()) {
        if (key == "positive") {
            if (!value.is_array()) {
                issues.push_back({"positives", issue_kind::missing_field,
                                  "'positive' must be an array"});
                continue;
            }
            raw.positives.emplace();
            for (std::size_t i = 0; i < value.size(); ++i) {
                if (!value[i].is_object()) {
                    const std::string path = "positives[" + std::to_string(i) + "]";
                    issues.push_back({path, issue_kind::missing_field, "finding must be an object"});
                    non_object_prefixes.push_back(path + ".");
                    raw.positives->emplace_back();
                    continue;
                }
                raw.positives->push_back(read_finding(value[i], i, issues));
            }
        } else if (key == "negative") {
            if (!value.is_array()) {
                issues.push_back({"negatives", issue_kind::missing_field,
                                  "'negative' must be an array"});
                continue;
            }
            raw.negatives.emplace();
            for (const auto& item : value) {
                if (item.is_string()) {
                    raw.negatives->push_back(item.get<std::string>());
                } else {
                    raw.negatives->push_back(std::nullopt);
                }
            }
        } else {
            log_warning("ignoring unknown top-level key '" + key + "'");
        }
    }

    // One list may be missing (e.g. cut off by truncation); it reads as empty.
    if (!doc.contains("positive") && !doc.contains("negative")) {
        issues.push_back({"$", issue_kind::missing_field,
                          "object has neither a 'positive' nor a 'negative' list"});
        throw report_schema_error(std::move(issues));
    }
    if (!doc.contains("positive")) {
        raw.positives.emplace();
    }
    if (!doc.contains("negative")) {
        raw.negatives.emplace();
    }

    const bool had_container_errors =
        std::any_of(issues.begin(), issues.end(), [](const validation_issue& issue) {
            return issue.path == "positives" || issue.path == "negatives";
        });
    for (auto& issue : validate(raw)) {
        // A container that had the wrong type is already reported.
        if (had_container_errors && (issue.path == "positives" || issue.path == "negatives")) {
            continue;
        }
        const bool inside_non_object =
            std::any_of(non_object_prefixes.begin(), non_object_prefixes.end(),
                        [&](const std::string& prefix) { return issue.path.rfind(prefix, 0) == 0; });
        if (inside_non_object) {
            continue;
        }
        issues.push_back(std::move(issue));
    }
    if (!issues.empty()) {
        throw report_schema_error(std::move(issues));
    }
    return to_report(raw);
}

lenient_result parse_lenient(std::string_view text) {
    auto [repaired, log] = repair(text);
    if (log.exhausted || !is_json_object(repaired)) {
        throw unparseable_error(std::move(log));
    }
    return {parse_strict(repaired), std::move(log)};
}

std::string serialize(const structured_report& report) {
    const structured_report canonical = canonical_form(report);
    ordered_json doc = ordered_json::object();
    ordered_json positives = ordered_json::array();
    for (const auto& f : canonical.positives) {
        ordered_json item = ordered_json::object();
        item["name"] = f.name;
        if (f.probability) {
            item["probability"] = f.probability->value();
        }
        item["level"] = std::string(to_string(f.level));
        if (f.location) {
            item["location"] = *f.location;
        }
        positives.push_back(std::move(item));
    }
    doc["positive"] = std::move(positives);
    doc["negative"] = canonical.negatives;
    return doc.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

}  // namespace sreval
