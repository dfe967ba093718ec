#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace prefclust {

/// Base of every error raised by the library. `code()` is a stable,
/// machine-readable identifier (used in CLI messages and API error bodies).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string &message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string &code() const noexcept { return code_; }

private:
    std::string code_;
};

/// A coordinate outside its legal range. `field()` is "lat" or "lon".
class OutOfRange : public Error {
public:
    OutOfRange(std::string field, double value)
        : Error("OutOfRange", field + " out of range: " + std::to_string(value)),
          field_(std::move(field)), value_(value) {}

    const std::string &field() const noexcept { return field_; }
    double value() const noexcept { return value_; }

private:
    std::string field_;
    double value_;
};

class EmptyTree : public Error {
public:
    EmptyTree() : Error("EmptyTree", "preference tree has no class with any node") {}
};

class EmptyClass : public Error {
public:
    explicit EmptyClass(const std::string &class_name)
        : Error("EmptyClass", "class '" + class_name + "' has no nodes") {}
};

class TooLarge : public Error {
public:
    explicit TooLarge(const std::string &message) : Error("TooLarge", message) {}
};

class InconsistentInput : public Error {
public:
    explicit InconsistentInput(const std::string &message)
        : Error("InconsistentInput", message) {}
};

/// Structural problem in an input document. `where()` is a row number (CSV)
/// or a JSON path.
class ParseError : public Error {
public:
    enum class Kind { BadHeader, BadCoordinate, EmptyFile, Malformed };

    ParseError(Kind kind, std::string where, const std::string &message)
        : Error(kind_name(kind), message), kind_(kind), where_(std::move(where)) {}

    Kind kind() const noexcept { return kind_; }
    const std::string &where() const noexcept { return where_; }

    static std::string kind_name(Kind k) {
        switch (k) {
        case Kind::BadHeader: return "BadHeader";
        case Kind::BadCoordinate: return "BadCoordinate";
        case Kind::EmptyFile: return "EmptyFile";
        case Kind::Malformed: return "Malformed";
        }
        return "Malformed";
    }

private:
    Kind kind_;
    std::string where_;
};

/// A request field violating its bounds (QuerySpec, API bodies).
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string &message)
        : Error("ValidationError", field + ": " + message), field_(std::move(field)) {}

    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

class ProviderError : public Error {
public:
    enum class Kind { NotFound, ProviderUnavailable, RateLimited };

    ProviderError(Kind kind, const std::string &message)
        : Error(kind_name(kind), message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

    static std::string kind_name(Kind k) {
        switch (k) {
        case Kind::NotFound: return "NotFound";
        case Kind::ProviderUnavailable: return "ProviderUnavailable";
        case Kind::RateLimited: return "RateLimited";
        }
        return "ProviderUnavailable";
    }

private:
    Kind kind_;
};

} // namespace prefclust
