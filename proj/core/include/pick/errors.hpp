// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pick {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (JSON, JSONL, manifest). Carries the 1-based line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0)
        : Error(line ? message + " (line " + std::to_string(line) + ")" : message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DecompositionError : public Error {
public:
    using Error::Error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

class EmbeddingError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    TrainingError(const std::string& message, std::size_t epoch)
        : Error(message + " at epoch " + std::to_string(epoch)), epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

class SamplingError : public Error {
public:
    using Error::Error;
};

class UpdateError : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    TemplateError(const std::string& message, std::string slot)
        : Error(message), slot_(std::move(slot)) {}

    const std::string& slot() const noexcept { return slot_; }

private:
    std::string slot_;
};

/// Model output that could not be parsed into the expected shape.
class ResponseParseError : public Error {
public:
    using Error::Error;
};

/// Request never produced a usable response body (connection, HTTP status, timeout).
class TransportError : public Error {
public:
    using Error::Error;
};

/// All attempts of a backend query failed.
class BackendError : public Error {
public:
    enum class Kind { kTransport, kParse };

    BackendError(const std::string& message, Kind kind, std::string last_raw_text, int attempts)
        : Error(message), kind_(kind), last_raw_text_(std::move(last_raw_text)), attempts_(attempts) {}

    Kind kind() const noexcept { return kind_; }
    const std::string& last_raw_text() const noexcept { return last_raw_text_; }
    int attempts() const noexcept { return attempts_; }

private:
    Kind kind_;
    std::string last_raw_text_;
    int attempts_;
};

class AggregationError : public Error {
public:
    using Error::Error;
};

class MetricsError : public Error {
public:
    using Error::Error;
};

class ImageError : public Error {
public:
    using Error::Error;
};

}  // namespace pick
