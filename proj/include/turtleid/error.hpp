#pragma once

#include <stdexcept>
#include <string>

namespace turtleid {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingFile : Error {
    explicit MissingFile(const std::string& path) : Error("missing file: " + path) {}
};

struct DecodeError : Error {
    using Error::Error;
};

struct ParseError : Error {
    int line;
    ParseError(int line_, const std::string& reason)
        : Error("manifest line " + std::to_string(line_) + ": " + reason), line(line_) {}
};

struct InvalidRoi : Error {
    int line;
    explicit InvalidRoi(int line_)
        : Error("manifest line " + std::to_string(line_) + ": invalid ROI"), line(line_) {}
};

struct RoiOutOfBounds : Error {
    using Error::Error;
};

struct IncompatibleGeometry : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct PatchOutOfBounds : Error {
    using Error::Error;
};

struct EmptyGallery : Error {
    using Error::Error;
};

struct GalleryTooSmall : Error {
    using Error::Error;
};

struct TooFewSamples : Error {
    using Error::Error;
};

struct EmptyRow : Error {
    using Error::Error;
};

struct UnknownClass : Error {
    explicit UnknownClass(const std::string& label) : Error("unknown class: " + label) {}
};

struct UnknownSample : Error {
    explicit UnknownSample(const std::string& id) : Error("unknown sample: " + id) {}
};

}  // namespace turtleid
