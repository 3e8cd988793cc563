#pragma once

#include <stdexcept>
#include <string>

namespace drain {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data: unusable tiles, empty selections, malformed files.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid caller-supplied parameters or configuration.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Training diverged or produced a non-finite quantity.
class NumericalError : public Error {
public:
    using Error::Error;
};

enum class FormatErrorKind { BadMagic, Truncated, DimensionMismatch, Io };

const char* to_string(FormatErrorKind kind) noexcept;

/// Malformed SWT1 / MSK1 / MOS1 / QNT1 container.
class FormatError : public DataError {
public:
    FormatError(FormatErrorKind kind, const std::string& what)
        : DataError(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    FormatErrorKind kind() const noexcept { return kind_; }

private:
    FormatErrorKind kind_;
};

/// Tile too small or not conformant with the network's down-sampling factor.
class TileError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace drain
