#ifndef MILKSTREAM_ERRORS_HPP
#define MILKSTREAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace milkstream {

// Numeric breakdown: non-finite losses, mass-conservation violations, etc.
// Maps to process exit code 2.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem-level failure (unreadable/unwritable path). Exit code 3.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally bad input file (wrong line counts, bad headers). Exit code 3.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Checkpoint magic/version mismatch. Exit code 3.
struct VersionError : std::runtime_error {
    explicit VersionError(const std::string& what) : std::runtime_error(what) {}
};

// A caller broke a streaming/ordering contract (logic bug, not bad data).
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace milkstream

#endif
