#pragma once

#include <stdexcept>
#include <string>

#include "lsr/types.hpp"

namespace lsr {

// Base for everything this library throws. Subclasses map to CLI exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class RankError : public Error {
public:
    RankError(const std::string& msg, Index numeric_rank)
        : Error(msg), numeric_rank(numeric_rank) {}
    Index numeric_rank;
};

class StorageError : public Error {
public:
    using Error::Error;
};

class CorruptSliceError : public StorageError {
public:
    CorruptSliceError(const std::string& msg, Index slice)
        : StorageError(msg), slice(slice) {}
    Index slice;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    long line;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

ShapeError shape_mismatch(const char* op, Index a_rows, Index a_cols, Index b_rows,
                          Index b_cols);

}  // namespace lsr
