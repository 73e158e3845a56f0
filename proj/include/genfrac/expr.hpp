#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "genfrac/errors.hpp"

namespace genfrac {

/// A compiled arithmetic expression over a fixed set of named variables.
///
/// Grammar: numbers, variables, parentheses, binary + - * / ^ (right
/// associative power), unary minus, calls exp(x), cos(x), sin(x), sqrt(x),
/// gamma(x), pow(x, y), and the constant pi. Parse errors throw SchemaError.
class Expression {
public:
    static Expression parse(const std::string& text, std::vector<std::string> variables);

    double eval(std::span<const double> values) const;

    const std::vector<std::string>& variables() const { return vars_; }
    const std::string& text() const { return text_; }

private:
    enum class Op : std::uint8_t {
        PushConst, PushVar, Add, Sub, Mul, Div, Pow, Neg,
        Exp, Cos, Sin, Sqrt, Gamma, Pow2
    };
    struct Instr {
        Op op;
        double value = 0.0;
        int var = 0;
    };

    std::vector<Instr> code_;
    std::vector<std::string> vars_;
    std::string text_;

    friend class ExprParser;
};

} // namespace genfrac
