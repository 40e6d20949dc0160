#pragma once

#include <stdexcept>
#include <string>

namespace kgbox {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed KGTEN magic or header line.
class FormatError : public Error {
public:
    using Error::Error;
};

// Payload shorter or longer than the header declares.
class TruncationError : public Error {
public:
    using Error::Error;
};

// Contract violation on inputs: shapes, ranges, non-finite values.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// JSON Lines parse failure; what() names the file and line.
class ParseError : public Error {
public:
    using Error::Error;
};

// Synthetic scene constraints could not be met within the attempt budget.
class GenerationError : public Error {
public:
    using Error::Error;
};

}  // namespace kgbox
