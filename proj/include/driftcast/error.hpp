#pragma once

#include <stdexcept>
#include <string>

namespace driftcast {

/// Classifies failures so the C API and CLI can map them to status/exit codes.
enum class ErrorKind {
    InvalidArgument,
    InsufficientData,
    Config,
    Data,
    Io,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& what) : Error(ErrorKind::InsufficientData, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

struct InternalError : Error {
    explicit InternalError(const std::string& what) : Error(ErrorKind::Internal, what) {}
};

} // namespace driftcast
