#pragma once

#include <stdexcept>
#include <string>

namespace cfinsler {

/// A point was rejected by a metric's domain constraints (or the metric
/// degenerated there). Distinct from numerical failure.
class DomainViolation : public std::runtime_error {
public:
    explicit DomainViolation(const std::string& what) : std::runtime_error(what) {}
};

/// DSL lex/parse/validation failure, with 1-based source location.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " +
                             std::to_string(column)),
          line(line),
          column(column) {}
    int line;
    int column;
};

/// A derivative of higher order than the jet context retains was requested.
class OrderBudgetError : public std::runtime_error {
public:
    explicit OrderBudgetError(const std::string& quantity)
        : std::runtime_error("order budget exceeded while computing " + quantity) {}
};

/// sqrt/log/pow applied to a jet whose constant term is not real-positive.
class BranchViolation : public std::runtime_error {
public:
    explicit BranchViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cfinsler
