#include "pfl/log.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>
#include <utility>

namespace pfl {
namespace {

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& current_handler() {
    static WarningHandler handler;
    return handler;
}

}  // namespace

void warn(const std::string& message) {
    WarningHandler handler;
    {
        std::lock_guard lock(handler_mutex());
        handler = current_handler();
    }
    if (handler) {
        handler(message);
        return;
    }
    std::lock_guard lock(handler_mutex());
    std::cerr << "pfl: warning: " << message << '\n';
}

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(handler_mutex());
    return std::exchange(current_handler(), std::move(handler));
}

ScopedWarningCapture::ScopedWarningCapture() {
    previous_ = set_warning_handler([this](const std::string& msg) {
        static std::mutex m;
        std::lock_guard lock(m);
        messages_.push_back(msg);
    });
}

ScopedWarningCapture::~ScopedWarningCapture() { set_warning_handler(std::move(previous_)); }

bool ScopedWarningCapture::contains(const std::string& needle) const {
    return std::any_of(messages_.begin(), messages_.end(),
                       [&](const std::string& m) { return m.find(needle) != std::string::npos; });
}

}  // namespace pfl
