#include "sreval/log.hpp"

#include <iostream>
#include <mutex>

namespace sreval {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

warning_sink& current_sink() {
    static warning_sink sink;
    return sink;
}

}  // namespace

warning_sink set_warning_sink(warning_sink sink) {
    std::lock_guard lock(sink_mutex());
    warning_sink previous = std::move(current_sink());
    current_sink() = std::move(sink);
    return previous;
}

void log_warning(std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) {
        current_sink()(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

}  // namespace sreval
