#include <iostream>
#include <mutex>

#include "cheshire/errors.hpp"

namespace cheshire {

namespace {

std::mutex sink_mutex;

WarningSink &sink() {
    static WarningSink s = [](std::string_view message) { std::cerr << "warning: " << message << '\n'; };
    return s;
}

}  // namespace

WarningSink set_warning_sink(WarningSink next) {
    std::lock_guard lock(sink_mutex);
    WarningSink previous = std::move(sink());
    sink() = std::move(next);
    return previous;
}

void warn(std::string_view message) {
    std::lock_guard lock(sink_mutex);
    if (sink()) {
        sink()(message);
    }
}

}  // namespace cheshire
