#pragma once

#include <stdexcept>
#include <string>

namespace thinpred {

// Precondition violations (bad rate, mismatched lengths, malformed CSV rows)
// throw std::invalid_argument. Statistics that are undefined for the given
// data (constant series, singular regressions) throw std::domain_error.
// Both derive from std::logic_error, which the CLI maps to exit code 2.
// I/O failures throw std::runtime_error (exit code 1).

[[noreturn]] inline void fail_argument(const std::string& what) {
    throw std::invalid_argument(what);
}

[[noreturn]] inline void fail_undefined(const std::string& what) {
    throw std::domain_error(what);
}

}  // namespace thinpred
