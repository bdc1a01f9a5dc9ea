#pragma once

#include <stdexcept>
#include <string>

namespace geo4 {

enum class ErrorKind {
    UnsupportedDimension,
    InvalidCubic,
    NotUnimodular,
    InvalidArgument,
    RangeExceeded,
    BadWord,
    Inconsistent,
    NotPolycyclic,
    Unsupported,
    UnsupportedFlatBase,
    UnsupportedBase,
    MonodromyNotTrivial,
    NotHyperbolic,
    NotNilpotent,
    InvalidDescriptor,
    Parse,
};

const char* error_kind_name(ErrorKind k);

// Input errors map to exit code 2, unsupported families to exit code 3.
bool is_input_error(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::string path = {})
        : std::runtime_error(what), kind_(kind), path_(std::move(path)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& path() const { return path_; }

private:
    ErrorKind kind_;
    std::string path_;
};

} // namespace geo4
