#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kqic {

// Base class for every error raised by the library. The category maps onto
// the C API status codes and the CLI exit codes.
enum class ErrorCategory { Data = 1, Config = 2, Feasibility = 3, Argument = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// Malformed or invalid input data (CSV parse failures, invariant violations).
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

/// A CSV parse or validation failure tied to a 1-based line of the source.
class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Violation {
    std::size_t index;
    std::string message;
};

/// Raised by validate(); carries every violated invariant, not only the first.
class ValidationError : public DataError {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : DataError(summarize(violations)), violations_(std::move(violations)) {}
    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::vector<Violation>& v) {
        std::string out = std::to_string(v.size()) + " invalid sample(s)";
        for (const auto& e : v) {
            out += "; index " + std::to_string(e.index) + ": " + e.message;
        }
        return out;
    }
    std::vector<Violation> violations_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

// The requested computation cannot be carried out on this input (degenerate
// bandwidth, unreachable censoring target, truncation too severe, ...).
class FeasibilityError : public Error {
public:
    explicit FeasibilityError(const std::string& what)
        : Error(ErrorCategory::Feasibility, what) {}
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(ErrorCategory::Argument, what) {}
};

}  // namespace kqic
