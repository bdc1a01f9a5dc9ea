#include "geo4/error.hpp"

namespace geo4 {

const char* error_kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::InvalidCubic: return "InvalidCubic";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::RangeExceeded: return "RangeExceeded";
    case ErrorKind::BadWord: return "BadWord";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::NotPolycyclic: return "NotPolycyclic";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::UnsupportedFlatBase: return "UnsupportedFlatBase";
    case ErrorKind::UnsupportedBase: return "UnsupportedBase";
    case ErrorKind::MonodromyNotTrivial: return "MonodromyNotTrivial";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::NotNilpotent: return "NotNilpotent";
    case ErrorKind::InvalidDescriptor: return "InvalidDescriptor";
    case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

bool is_input_error(ErrorKind k)
{
    switch (k) {
    case ErrorKind::NotPolycyclic:
    case ErrorKind::Unsupported:
    case ErrorKind::UnsupportedFlatBase:
    case ErrorKind::UnsupportedBase:
    case ErrorKind::UnsupportedDimension:
    case ErrorKind::RangeExceeded:
        return false;
    default:
        return true;
    }
}

} // namespace geo4
