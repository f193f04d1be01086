#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace streamlink {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed or inconsistent input record. Carries the file and 1-based line.
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what),
          file_(std::move(file)), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// A training loss became NaN or infinite.
class NonFiniteLoss : public Error {
public:
    explicit NonFiniteLoss(const std::string& term)
        : Error("non-finite value in loss term '" + term + "'"), term_(term) {}

    const std::string& term() const noexcept { return term_; }

private:
    std::string term_;
};

}  // namespace streamlink
