#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace courtfda {

// Each pipeline stage throws its own subtype so callers can map a failure
// back to the stage that produced it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

class ParseError : public IngestError {
public:
    ParseError(std::size_t row, const std::string& what)
        : IngestError("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class DensityError : public Error {
public:
    using Error::Error;
};

class FdaError : public Error {
public:
    using Error::Error;
};

class ClusterError : public Error {
public:
    using Error::Error;
};

class MetricsError : public Error {
public:
    using Error::Error;
};

class BootstrapError : public Error {
public:
    using Error::Error;
};

class ExportError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace courtfda
