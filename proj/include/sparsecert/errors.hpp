#pragma once

#include <stdexcept>
#include <string>

namespace sparsecert {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CategoryError : std::runtime_error {
    explicit CategoryError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BoundaryError : std::runtime_error {
    explicit BoundaryError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CountError : std::runtime_error {
    explicit CountError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidityError : std::runtime_error {
    explicit ValidityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyVotes : std::runtime_error {
    explicit EmptyVotes(const std::string& msg) : std::runtime_error(msg) {}
};

struct SizeError : std::runtime_error {
    explicit SizeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal consistency violations (broken invariants, not bad input).
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace sparsecert
