#pragma once

#include <string>
#include <vector>

#include "focusst/core.hpp"

namespace focusst {

struct SourceSpan {
    std::string file = "<memory>";
    Nat line = 1;
    Nat column = 1;
    Nat length = 0;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    SourceSpan span;

    std::string to_string() const {
        return span.file + ":" + std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
               (severity == Severity::Error ? "error: " : "warning: ") + message;
    }
};

inline bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error)
            return true;
    return false;
}

}  // namespace focusst
