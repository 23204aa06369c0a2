#pragma once

#include <stdexcept>
#include <string>

namespace crossworld {

// Error taxonomy shared by the library and the CLI. Every library error derives
// from one of three categories, each mapped to a process exit code:
//
//   ConfigError  -> 2   (bad usage, bad configuration, oversized requests)
//   DataError    -> 3   (bad input data, degenerate datasets, I/O failures)
//   NumericError -> 4   (non-finite intermediate values)
class Error : public std::runtime_error {
public:
    Error(const std::string& msg, int exit_code)
        : std::runtime_error(msg), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg, 2) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg, 3) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg, 4) {}
};

// --- configuration / usage ---------------------------------------------------
class InvalidConfig : public ConfigError { public: using ConfigError::ConfigError; };
class ParseError    : public ConfigError { public: using ConfigError::ConfigError; };
class SchemaError   : public ConfigError { public: using ConfigError::ConfigError; };
class GridTooLarge  : public ConfigError { public: using ConfigError::ConfigError; };

// --- data --------------------------------------------------------------------
class FormatError         : public DataError { public: using DataError::DataError; };
class EmptyFile           : public DataError { public: using DataError::DataError; };
class EmptyCell           : public DataError { public: using DataError::DataError; };
class PositivityViolation : public DataError { public: using DataError::DataError; };
class NotBinaryOutcome    : public DataError { public: using DataError::DataError; };
class RankDeficient       : public DataError { public: using DataError::DataError; };
class DegenerateStratum   : public DataError { public: using DataError::DataError; };
class InvalidInput        : public DataError { public: using DataError::DataError; };
class IoError             : public DataError { public: using DataError::DataError; };

// --- numerical ---------------------------------------------------------------
class NonFinite : public NumericError { public: using NumericError::NumericError; };

} // namespace crossworld
