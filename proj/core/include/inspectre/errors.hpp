#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "inspectre/name.hpp"

namespace inspectre {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UndecodableAddress : public Error {
public:
    explicit UndecodableAddress(Word addr);
    Word address() const { return addr_; }

private:
    Word addr_;
};

class NotAMemoryOp : public Error {
public:
    explicit NotAMemoryOp(Name n);
};

class NotInProgram : public Error {
public:
    explicit NotInProgram(Name n);
};

class RuleNotEnabled : public Error {
public:
    using Error::Error;
};

class NotAStep : public Error {
public:
    using Error::Error;
};

class ExplosionBudgetExceeded : public Error {
public:
    explicit ExplosionBudgetExceeded(std::size_t budget);
};

class FootprintMismatch : public Error {
public:
    using Error::Error;
};

class PreconditionViolated : public Error {
public:
    using Error::Error;
};

}  // namespace inspectre
