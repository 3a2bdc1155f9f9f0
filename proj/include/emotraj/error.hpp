#pragma once

#include <stdexcept>
#include <string>

namespace emotraj {

// Every failure mode the library reports. The CLI maps each code to a
// distinct process exit status (see exit_code below).
enum class ErrorCode {
    InvalidArgument,
    MissingFile,
    BadFrameCount,
    DuplicateFrameIndex,
    ManifestParse,
    BadImage,
    DegenerateEyes,
    OutOfBounds,
    EmptyClass,
    DegenerateData,
    DimensionMismatch,
    SingleClass,
    MissingEmotion,
    UnknownLabel,
    UnreadableModel,
    IoError,
    EmptyTestSet,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:     return "InvalidArgument";
        case ErrorCode::MissingFile:         return "MissingFile";
        case ErrorCode::BadFrameCount:       return "BadFrameCount";
        case ErrorCode::DuplicateFrameIndex: return "DuplicateFrameIndex";
        case ErrorCode::ManifestParse:       return "ManifestParse";
        case ErrorCode::BadImage:            return "BadImage";
        case ErrorCode::DegenerateEyes:      return "DegenerateEyes";
        case ErrorCode::OutOfBounds:         return "OutOfBounds";
        case ErrorCode::EmptyClass:          return "EmptyClass";
        case ErrorCode::DegenerateData:      return "DegenerateData";
        case ErrorCode::DimensionMismatch:   return "DimensionMismatch";
        case ErrorCode::SingleClass:         return "SingleClass";
        case ErrorCode::MissingEmotion:      return "MissingEmotion";
        case ErrorCode::UnknownLabel:        return "UnknownLabel";
        case ErrorCode::UnreadableModel:     return "UnreadableModel";
        case ErrorCode::IoError:             return "IoError";
        case ErrorCode::EmptyTestSet:        return "EmptyTestSet";
    }
    return "UnknownError";
}

// Stable exit-status mapping for the CLI; 0 is success, 1 is reserved for
// unclassified failures, 2 for command-line usage errors.
inline int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:     return 10;
        case ErrorCode::MissingFile:         return 11;
        case ErrorCode::BadFrameCount:       return 12;
        case ErrorCode::DuplicateFrameIndex: return 13;
        case ErrorCode::ManifestParse:       return 14;
        case ErrorCode::BadImage:            return 15;
        case ErrorCode::DegenerateEyes:      return 16;
        case ErrorCode::OutOfBounds:         return 17;
        case ErrorCode::EmptyClass:          return 18;
        case ErrorCode::DegenerateData:      return 19;
        case ErrorCode::DimensionMismatch:   return 20;
        case ErrorCode::SingleClass:         return 21;
        case ErrorCode::MissingEmotion:      return 22;
        case ErrorCode::UnknownLabel:        return 23;
        case ErrorCode::UnreadableModel:     return 24;
        case ErrorCode::IoError:             return 25;
        case ErrorCode::EmptyTestSet:        return 26;
    }
    return 1;
}

} // namespace emotraj
