#pragma once

#include <stdexcept>
#include <string>

namespace avdb {

enum class ErrorCode {
    MalformedImage,
    UnsupportedFormat,
    NotGrayscale,
    ImageTooSmall,
    DimsNotDivisible,
    EmptyClass,
    EmptyDataset,
    KTooLarge,
    DimMismatch,
    SingleClassDataset,
    ChannelMismatch,
    OddDims,
    SizeMismatch,
    BadTarget,
    LengthMismatch,
    EmptyInput,
    InvalidArgument,
    BadModelFile,
    ConfigError,
    IoError,
};

/// Single exception type for the whole toolkit; the code tells callers
/// which contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace avdb
