#pragma once

#include <functional>
#include <string>
#include <vector>

namespace pfl {

using WarningHandler = std::function<void(const std::string&)>;

// Warnings go to stderr unless a handler is installed. Handlers must be
// thread-safe when warnings can be raised from concurrent runs.
void warn(const std::string& message);

// Installs a handler and returns the previous one. Passing an empty function
// restores the stderr default.
WarningHandler set_warning_handler(WarningHandler handler);

/// Captures warnings for the lifetime of the object (tests, scenario logs).
class ScopedWarningCapture {
public:
    ScopedWarningCapture();
    ~ScopedWarningCapture();
    ScopedWarningCapture(const ScopedWarningCapture&) = delete;
    ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

    const std::vector<std::string>& messages() const { return messages_; }
    bool contains(const std::string& needle) const;

private:
    WarningHandler previous_;
    std::vector<std::string> messages_;
};

}  // namespace pfl
