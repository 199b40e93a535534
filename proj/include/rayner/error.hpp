#pragma once

/**
 * @file error.hpp
 * @brief Exception hierarchy shared by every rayner module.
 */

#include <stdexcept>
#include <string>

namespace rayner {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two operands live over different groups or different coefficient fields.
class descriptor_mismatch : public error {
public:
    using error::error;
};

/// A documented precondition was violated (bad witness, invalid descriptor, ...).
class precondition_violation : public error {
public:
    using error::error;
};

class division_by_zero : public error {
public:
    using error::error;
};

/// Ordering predicate requested on a field that carries no ordering.
class unsupported_order : public error {
public:
    using error::error;
};

/// No nonzero coefficient exists up to the evaluation horizon.
class zero_up_to_horizon : public error {
public:
    using error::error;
};

/// Correctness below the exponent bound cannot be guaranteed within the term budget.
class term_budget_exceeded : public error {
public:
    using error::error;
};

/// A finite-sum closure was requested for a set with a negative element.
class not_in_nonneg_cone : public error {
public:
    using error::error;
};

/// Bounded search could neither confirm nor refute membership.
class unknown_within_budget : public error {
public:
    using error::error;
};

/// Witness construction needs a coefficient outside {0, -a}, impossible over F2.
class field_too_small : public error {
public:
    using error::error;
};

class hypothesis_not_met : public error {
public:
    using error::error;
};

/// Syntax error with a 1-based source column.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t line, std::size_t column)
        : error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line),
          column_(column)
    {
    }

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

} // namespace rayner
