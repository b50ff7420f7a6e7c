#pragma once

#include <stdexcept>
#include <string>

namespace specmatch {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MalformedLine : Error {
    int line_no;
    explicit MalformedLine(int line, const std::string& content)
        : Error("malformed data line " + std::to_string(line) + ": " + content),
          line_no(line) {}
};

struct EmptySpectrum : Error {
    EmptySpectrum() : Error("spectrum has fewer than 2 data points") {}
};

struct NonMonotonicGrid : Error {
    NonMonotonicGrid() : Error("wavenumbers are not strictly increasing") {}
};

struct InvalidGrid : Error {
    explicit InvalidGrid(const std::string& msg) : Error("invalid grid: " + msg) {}
};

struct NonFiniteInput : Error {
    NonFiniteInput() : Error("input contains non-finite values") {}
};

struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& msg) : Error("shape mismatch: " + msg) {}
};

struct DegenerateBatch : Error {
    DegenerateBatch() : Error("batch statistics require at least 2 values per channel") {}
};

struct NoForwardCache : Error {
    NoForwardCache() : Error("backward called without a cached train-mode forward pass") {}
};

struct SolveFailure : Error {
    SolveFailure() : Error("banded linear solve hit a non-positive pivot") {}
};

struct NoPositivePairs : Error {
    NoPositivePairs() : Error("no class has two or more samples") {}
};

struct TooFewClasses : Error {
    explicit TooFewClasses(const std::string& msg) : Error("too few classes: " + msg) {}
};

struct EmptyDB : Error {
    EmptyDB() : Error("reference database is empty") {}
};

struct UnknownClass : Error {
    explicit UnknownClass(int class_id)
        : Error("class " + std::to_string(class_id) + " not present in database") {}
};

struct ModelMismatch : Error {
    ModelMismatch() : Error("database was embedded with a different model snapshot") {}
};

struct ZeroVector : Error {
    ZeroVector() : Error("cosine similarity undefined for an all-zero vector") {}
};

struct LengthMismatch : Error {
    LengthMismatch() : Error("prediction and truth sequences differ in length") {}
};

struct NoValidFiles : Error {
    NoValidFiles() : Error("no parseable spectrum files found") {}
};

struct IOError : Error {
    explicit IOError(const std::string& msg) : Error("I/O error: " + msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

}  // namespace specmatch
