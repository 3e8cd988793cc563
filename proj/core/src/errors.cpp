#include "drain/errors.hpp"

namespace drain {

const char* to_string(FormatErrorKind kind) noexcept
{
    switch (kind) {
    case FormatErrorKind::BadMagic: return "bad magic";
    case FormatErrorKind::Truncated: return "truncated payload";
    case FormatErrorKind::DimensionMismatch: return "dimension mismatch";
    case FormatErrorKind::Io: return "i/o error";
    }
    return "format error";
}

}  // namespace drain
