#pragma once

// Expression language for metric functions L(z, eta). Identifiers z1, z2,
// e1, e2 denote coordinates; conj() introduces the barred variables; lets
// are bound in order and must all be used.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cfinsler/jets.hpp"

namespace cfinsler::dsl {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum Kind { kNumber, kImag, kIdent, kNeg, kAdd, kSub, kMul, kDiv, kPow, kCall };
    Kind kind;
    double number = 0.0;       // kNumber, and the exponent for kPow
    std::string name;          // kIdent, and the function name for kCall
    ExprPtr lhs, rhs;
    int line = 0, column = 0;
};

struct Program {
    std::string source;
    std::vector<std::pair<std::string, ExprPtr>> lets;
    ExprPtr body;
};

/// Parses and validates a metric program. Throws ParseError with the
/// offending source location on any lexical, syntactic or name error.
Program parse(const std::string& text);

using Env = std::map<std::string, WJet>;

/// Evaluates with z1, z2, e1, e2 bound to arbitrary jets; used directly
/// for coordinate-change experiments.
WJet eval(const Program& p, const Env& env);

/// Evaluates at the context's coordinate seeds.
WJet eval(const Program& p, const Seeds& s);

}  // namespace cfinsler::dsl
