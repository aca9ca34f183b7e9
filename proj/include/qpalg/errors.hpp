#pragma once

#include <stdexcept>
#include <string>

namespace qpalg {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& msg = "division by zero") : Error(msg) {}
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

struct IndexError : Error {
    explicit IndexError(const std::string& msg) : Error(msg) {}
};

struct UnsupportedError : Error {
    explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

struct SizeError : Error {
    explicit SizeError(const std::string& msg) : Error(msg) {}
};

struct SpecError : Error {
    explicit SpecError(const std::string& msg) : Error(msg) {}
};

struct SingularError : Error {
    explicit SingularError(const std::string& msg) : Error(msg) {}
};

struct ConstructionError : Error {
    explicit ConstructionError(const std::string& msg) : Error(msg) {}
};

struct WindowError : Error {
    explicit WindowError(const std::string& msg) : Error(msg) {}
};

struct ExtractionError : Error {
    explicit ExtractionError(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& msg) : Error(msg) {}
};

}  // namespace qpalg
