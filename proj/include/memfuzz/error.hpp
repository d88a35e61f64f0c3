#pragma once

#include <stdexcept>
#include <string>

namespace memfuzz {

// Base for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Illegal extended-natural arithmetic (finite underflow, overflow).
class ArithmeticError : public Error {
public:
    using Error::Error;
};

// A caller violated an operation's precondition (unknown membrane, grade
// outside the grade set, invalid system handed to the engine, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A semantic invariant of the engine failed. Never expected on valid input.
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace memfuzz
