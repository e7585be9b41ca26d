#include "sreval/report_model.hpp"

#include "sreval/text.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sreval {

probability_score::probability_score(int value) : value_(value) {
    if (value < 1 || value > 3) {
        throw std::invalid_argument("probability must be 1, 2 or 3, got " +
                                    std::to_string(value));
    }
}

std::optional<probability_score> probability_score::from_int(long long value) noexcept {
    if (value < 1 || value > 3) {
        return std::nullopt;
    }
    return probability_score(static_cast<int>(value));
}

std::string_view to_string(severity_level level) noexcept {
    switch (level) {
        case severity_level::unspecified: return "unspecified";
        case severity_level::mild: return "mild";
        case severity_level::moderate: return "moderate";
        case severity_level::severe: return "severe";
    }
    return "unspecified";
}

std::optional<severity_level> parse_severity(std::string_view text) noexcept {
    std::string lowered;
    for (char c : text) {
        lowered.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    }
    for (auto level : {severity_level::unspecified, severity_level::mild,
                       severity_level::moderate, severity_level::severe}) {
        if (lowered == to_string(level)) {
            return level;
        }
    }
    return std::nullopt;
}

std::string_view to_string(issue_kind kind) noexcept {
    switch (kind) {
        case issue_kind::missing_field: return "missing-field";
        case issue_kind::bad_enum: return "bad-enum";
        case issue_kind::duplicate_name: return "duplicate-name";
        case issue_kind::empty_name: return "empty-name";
        case issue_kind::cross_list_conflict: return "cross-list-conflict";
    }
    return "missing-field";
}

namespace {

std::string describe(const std::vector<validation_issue>& issues) {
    std::string what = "report failed validation:";
    for (const auto& issue : issues) {
        what += " [";
        what += to_string(issue.kind);
        what += " at ";
        what += issue.path;
        what += ": ";
        what += issue.message;
        what += "]";
    }
    return what;
}

bool is_punct(unsigned char c) {
    return c < 0x80 && c > ' ' && !((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                                    (c >= 'A' && c <= 'Z'));
}

std::string positive_path(std::size_t index, std::string_view field) {
    std::string path = "positives[" + std::to_string(index) + "]";
    if (!field.empty()) {
        path += ".";
        path += field;
    }
    return path;
}

std::string negative_path(std::size_t index) {
    return "negatives[" + std::to_string(index) + "]";
}

// Shared name checks for both report representations.
class name_checker {
public:
    explicit name_checker(std::vector<validation_issue>& issues) : issues_(issues) {}

    void positive(std::size_t index, std::string_view raw) {
        const std::string name = normalize_name(raw);
        const std::string path = positive_path(index, "name");
        if (name.empty()) {
            issues_.push_back({path, issue_kind::empty_name, "finding name is empty"});
            return;
        }
        if (!positive_names_.insert(name).second) {
            issues_.push_back({path, issue_kind::duplicate_name,
                               "'" + name + "' appears more than once in positives"});
            return;
        }
        positive_paths_.emplace(name, path);
    }

    void negative(std::size_t index, std::string_view raw) {
        const std::string name = normalize_name(raw);
        const std::string path = negative_path(index);
        if (name.empty()) {
            issues_.push_back({path, issue_kind::empty_name, "negative name is empty"});
            return;
        }
        if (!negative_names_.insert(name).second) {
            issues_.push_back({path, issue_kind::duplicate_name,
                               "'" + name + "' appears more than once in negatives"});
            return;
        }
        if (positive_names_.count(name) != 0) {
            issues_.push_back({path, issue_kind::cross_list_conflict,
                               "'" + name + "' is listed as both positive (" +
                                   positive_paths_.at(name) + ") and negative"});
        }
    }

private:
    std::vector<validation_issue>& issues_;
    std::set<std::string> positive_names_;
    std::set<std::string> negative_names_;
    std::map<std::string, std::string> positive_paths_;
};

}  // namespace

schema_error::schema_error(std::vector<validation_issue> issues)
    : std::runtime_error(describe(issues)), issues_(std::move(issues)) {}

std::string normalize_name(std::string_view raw) {
    std::string collapsed = collapse_whitespace(raw);
    std::size_t begin = 0;
    std::size_t end = collapsed.size();
    while (begin < end && is_punct(static_cast<unsigned char>(collapsed[begin]))) {
        ++begin;
    }
    while (end > begin && is_punct(static_cast<unsigned char>(collapsed[end - 1]))) {
        --end;
    }
    // Stripping punctuation can expose whitespace ("( edema )").
    std::string out = collapse_whitespace(std::string_view(collapsed).substr(begin, end - begin));
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    if (out.size() != collapsed.size()) {
        // Punctuation exposed by whitespace removal needs another pass.
        return normalize_name(out);
    }
    return out;
}

std::vector<validation_issue> validate(const raw_report& report) {
    std::vector<validation_issue> issues;
    name_checker names(issues);

    if (!report.positives) {
        issues.push_back({"positives", issue_kind::missing_field, "missing 'positive' list"});
    } else {
        for (std::size_t i = 0; i < report.positives->size(); ++i) {
            const raw_finding& f = (*report.positives)[i];
            if (!f.name) {
                issues.push_back({positive_path(i, "name"), issue_kind::missing_field,
                                  "finding has no name"});
            } else {
                names.positive(i, *f.name);
            }
            if (f.probability && !probability_score::from_int(*f.probability)) {
                issues.push_back({positive_path(i, "probability"), issue_kind::bad_enum,
                                  "probability " + std::to_string(*f.probability) +
                                      " is not in {1, 2, 3}"});
            }
            if (f.level && !parse_severity(*f.level)) {
                issues.push_back({positive_path(i, "level"), issue_kind::bad_enum,
                                  "unknown severity level '" + *f.level + "'"});
            }
        }
    }

    if (!report.negatives) {
        issues.push_back({"negatives", issue_kind::missing_field, "missing 'negative' list"});
    } else {
        for (std::size_t i = 0; i < report.negatives->size(); ++i) {
            const auto& name = (*report.negatives)[i];
            if (!name) {
                issues.push_back({negative_path(i), issue_kind::missing_field,
                                  "negative entry is not a name"});
            } else {
                names.negative(i, *name);
            }
        }
    }
    return issues;
}

std::vector<validation_issue> validate(const structured_report& report) {
    std::vector<validation_issue> issues;
    name_checker names(issues);
    for (std::size_t i = 0; i < report.positives.size(); ++i) {
        const positive_finding& f = report.positives[i];
        names.positive(i, f.name);
        if (f.location && tokenize(*f.location).empty()) {
            issues.push_back({positive_path(i, "location"), issue_kind::missing_field,
                              "location is present but blank"});
        }
    }
    for (std::size_t i = 0; i < report.negatives.size(); ++i) {
        names.negative(i, report.negatives[i]);
    }
    return issues;
}

structured_report to_report(const raw_report& report) {
    auto issues = validate(report);
    if (!issues.empty()) {
        throw schema_error(std::move(issues));
    }
    structured_report out;
    for (const raw_finding& f : *report.positives) {
        positive_finding finding;
        finding.name = normalize_name(*f.name);
        if (f.probability) {
            finding.probability = probability_score::from_int(*f.probability);
        }
        if (f.level) {
            finding.level = *parse_severity(*f.level);
        }
        if (f.location) {
            std::string location = collapse_whitespace(*f.location);
            if (!tokenize(location).empty()) {
                finding.location = std::move(location);
            }
        }
        out.positives.push_back(std::move(finding));
    }
    for (const auto& name : *report.negatives) {
        out.negatives.push_back(normalize_name(*name));
    }
    return out;
}

structured_report canonical_form(const structured_report& report) {
    auto issues = validate(report);
    if (!issues.empty()) {
        throw schema_error(std::move(issues));
    }
    structured_report out = report;
    for (auto& f : out.positives) {
        f.name = normalize_name(f.name);
        if (f.location) {
            f.location = collapse_whitespace(*f.location);
        }
    }
    for (auto& n : out.negatives) {
        n = normalize_name(n);
    }
    std::sort(out.positives.begin(), out.positives.end(),
              [](const positive_finding& a, const positive_finding& b) { return a.name < b.name; });
    std::sort(out.negatives.begin(), out.negatives.end());
    return out;
}

}  // namespace sreval
