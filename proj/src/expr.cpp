#include "genfrac/expr.hpp"

#include <cctype>
#include <cmath>

#include "genfrac/specfun.hpp"

namespace genfrac {

class ExprParser {
public:
    ExprParser(const std::string& text, const std::vector<std::string>& vars)
        : text_(text), vars_(vars) {}

    std::vector<Expression::Instr> run() {
        parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            throw SchemaError("expression: trailing input at '" + text_.substr(pos_) + "'");
        return std::move(code_);
    }

private:
    const std::string& text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
    std::vector<Expression::Instr> code_;

    void emit(Expression::Op op, double v = 0.0, int var = 0) { code_.push_back({op, v, var}); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void parse_sum() {
        parse_product();
        for (;;) {
            if (consume('+')) {
                parse_product();
                emit(Expression::Op::Add);
            } else if (consume('-')) {
                parse_product();
                emit(Expression::Op::Sub);
            } else {
                return;
            }
        }
    }

    void parse_product() {
        parse_unary();
        for (;;) {
            if (consume('*')) {
                parse_unary();
                emit(Expression::Op::Mul);
            } else if (consume('/')) {
                parse_unary();
                emit(Expression::Op::Div);
            } else {
                return;
            }
        }
    }

    void parse_unary() {
        if (consume('-')) {
            parse_unary();
            emit(Expression::Op::Neg);
            return;
        }
        (void)consume('+');
        parse_power();
    }

    void parse_power() {
        parse_atom();
        if (consume('^')) {
            parse_unary();  // right associative, unary binds to the exponent
            emit(Expression::Op::Pow);
        }
    }

    void parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw SchemaError("expression: unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number();
            return;
        }
        if (c == '(') {
            ++pos_;
            parse_sum();
            if (!consume(')')) throw SchemaError("expression: missing ')'");
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            parse_name();
            return;
        }
        throw SchemaError(std::string("expression: unexpected character '") + c + "'");
    }

    void parse_number() {
        std::size_t end = pos_;
        while (end < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
                text_[end] == 'e' || text_[end] == 'E' ||
                ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
                 (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
            ++end;
        const std::string tok = text_.substr(pos_, end - pos_);
        try {
            emit(Expression::Op::PushConst, std::stod(tok));
        } catch (...) {
            throw SchemaError("expression: bad number '" + tok + "'");
        }
        pos_ = end;
    }

    void parse_name() {
        std::size_t end = pos_;
        while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                      text_[end] == '_'))
            ++end;
        const std::string name = text_.substr(pos_, end - pos_);
        pos_ = end;
        if (peek() == '(') {
            ++pos_;
            parse_sum();
            if (name == "pow") {
                if (!consume(',')) throw SchemaError("expression: pow expects two arguments");
                parse_sum();
                if (!consume(')')) throw SchemaError("expression: missing ')'");
                emit(Expression::Op::Pow2);
                return;
            }
            if (!consume(')')) throw SchemaError("expression: missing ')'");
            if (name == "exp") emit(Expression::Op::Exp);
            else if (name == "cos") emit(Expression::Op::Cos);
            else if (name == "sin") emit(Expression::Op::Sin);
            else if (name == "sqrt") emit(Expression::Op::Sqrt);
            else if (name == "gamma") emit(Expression::Op::Gamma);
            else throw SchemaError("expression: unknown function '" + name +
                                   "' (have exp, cos, sin, sqrt, gamma, pow)");
            return;
        }
        if (name == "pi") {
            emit(Expression::Op::PushConst, 3.14159265358979323846);
            return;
        }
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name) {
                emit(Expression::Op::PushVar, 0.0, static_cast<int>(i));
                return;
            }
        }
        std::string known;
        for (const auto& v : vars_) known += (known.empty() ? "" : ", ") + v;
        throw SchemaError("expression: unknown variable '" + name + "' (have " + known + ")");
    }
};

Expression Expression::parse(const std::string& text, std::vector<std::string> variables) {
    Expression e;
    e.vars_ = std::move(variables);
    e.text_ = text;
    ExprParser p(text, e.vars_);
    e.code_ = p.run();
    return e;
}

double Expression::eval(std::span<const double> values) const {
    double stack[64];
    int top = -1;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::PushConst: stack[++top] = in.value; break;
            case Op::PushVar: stack[++top] = values[static_cast<std::size_t>(in.var)]; break;
            case Op::Add: --top; stack[top] += stack[top + 1]; break;
            case Op::Sub: --top; stack[top] -= stack[top + 1]; break;
            case Op::Mul: --top; stack[top] *= stack[top + 1]; break;
            case Op::Div: --top; stack[top] /= stack[top + 1]; break;
            case Op::Pow:
            case Op::Pow2: --top; stack[top] = std::pow(stack[top], stack[top + 1]); break;
            case Op::Neg: stack[top] = -stack[top]; break;
            case Op::Exp: stack[top] = std::exp(stack[top]); break;
            case Op::Cos: stack[top] = std::cos(stack[top]); break;
            case Op::Sin: stack[top] = std::sin(stack[top]); break;
            case Op::Sqrt: stack[top] = std::sqrt(stack[top]); break;
            case Op::Gamma: stack[top] = gamma_fn(stack[top]); break;
        }
    }
    return top >= 0 ? stack[top] : 0.0;
}

} // namespace genfrac
