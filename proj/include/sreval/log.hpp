/**
 * @file log.hpp
 * @brief Process-wide warning sink.
 *
 * Library code reports recoverable oddities (coerced fields, ignored keys,
 * rewriter failures) here instead of failing. The default sink writes to
 * stderr.
 */

#ifndef SREVAL_LOG_HPP
#define SREVAL_LOG_HPP

#include <functional>
#include <string_view>

namespace sreval {

using warning_sink = std::function<void(std::string_view)>;

/// Install a sink; an empty function restores the stderr default. Returns the previous sink.
warning_sink set_warning_sink(warning_sink sink);

void log_warning(std::string_view message);

/// Installs a sink for the lifetime of the guard.
class scoped_warning_sink {
public:
    explicit scoped_warning_sink(warning_sink sink) : previous_(set_warning_sink(std::move(sink))) {}
    ~scoped_warning_sink() { set_warning_sink(std::move(previous_)); }

    scoped_warning_sink(const scoped_warning_sink&) = delete;
    scoped_warning_sink& operator=(const scoped_warning_sink&) = delete;

private:
    warning_sink previous_;
};

}  // namespace sreval

#endif  // SREVAL_LOG_HPP
