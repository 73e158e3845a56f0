#include "genfrac/config.hpp"

#include <array>
#include <cstdio>
#include <fstream>

namespace genfrac {

std::vector<std::string> builtin_kernel_names() {
    return {"riemann_liouville", "exponential", "cosine", "constant_one", "counterexample",
            "custom"};
}

namespace {

double require_number(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw SchemaError("config: missing numeric field '" + key + "'");
    return j[key].get<double>();
}

std::string require_string(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_string())
        throw SchemaError("config: missing string field '" + key + "'");
    return j[key].get<std::string>();
}

} // namespace

Kernel kernel_from_json(const nlohmann::json& j) {
    const std::string name = require_string(j, "name");
    if (name == "riemann_liouville") return riemann_liouville_kernel(require_number(j, "alpha"));
    if (name == "exponential") return exponential_kernel(require_number(j, "alpha"));
    if (name == "cosine") return cosine_kernel(require_number(j, "alpha"));
    if (name == "constant_one") return constant_one_kernel();
    if (name == "counterexample") return counterexample_kernel();
    if (name == "custom") {
        const std::string expr = require_string(j, "expr");
        const double alpha = require_number(j, "alpha");
        const bool singular = j.value("singular", false);
        const std::string kind = j.value("kind", "difference");
        if (kind == "difference") return difference_kernel_from_expression(expr, alpha, singular);
        if (kind == "general") return general_kernel_from_expression(expr, alpha, singular);
        throw SchemaError("config: kernel kind must be 'difference' or 'general', got '" + kind + "'");
    }
    std::string known;
    for (const auto& k : builtin_kernel_names()) known += (known.empty() ? "" : ", ") + k;
    throw SchemaError("config: unknown kernel '" + name + "' (valid: " + known + ")");
}

Lagrangian lagrangian_from_json(const nlohmann::json& j) {
    const std::vector<std::string> vars{"t", "y", "u", "v", "w"};
    auto compile = [&](const std::string& key) {
        const Expression e = Expression::parse(require_string(j, key), vars);
        return [e](double t, double y, double u, double v, double w) {
            const std::array<double, 5> env{t, y, u, v, w};
            return e.eval(env);
        };
    };
    return Lagrangian::checked(compile("value"), compile("d2"), compile("d3"), compile("d4"),
                               compile("d5"));
}

VariationalProblem problem_from_json(const nlohmann::json& j) {
    VariationalProblem prob;
    if (!j.contains("domain")) throw SchemaError("config: missing 'domain'");
    prob.a = require_number(j["domain"], "a");
    prob.b = require_number(j["domain"], "b");
    prob.alpha = require_number(j, "alpha");
    prob.beta = require_number(j, "beta");
    if (!j.contains("p1") || !j.contains("p2")) throw SchemaError("config: missing 'p1'/'p2'");
    prob.P1 = {prob.a, prob.b, require_number(j["p1"], "p"), require_number(j["p1"], "q")};
    prob.P2 = {prob.a, prob.b, require_number(j["p2"], "p"), require_number(j["p2"], "q")};
    if (!j.contains("kernel_b") || !j.contains("kernel_k"))
        throw SchemaError("config: missing 'kernel_b'/'kernel_k'");
    prob.kernel_B = kernel_from_json(j["kernel_b"]);
    prob.kernel_K = kernel_from_json(j["kernel_k"]);
    if (!j.contains("lagrangian")) throw SchemaError("config: missing 'lagrangian'");
    prob.F = lagrangian_from_json(j["lagrangian"]);

    if (!j.contains("bc")) throw SchemaError("config: missing 'bc'");
    const std::string bct = require_string(j["bc"], "type");
    if (bct == "fixed") {
        prob.bc = BoundaryCondition::fixed(require_number(j["bc"], "ya"),
                                           require_number(j["bc"], "yb"));
    } else if (bct == "free_start") {
        prob.bc = BoundaryCondition::free_start(require_number(j["bc"], "yb"));
    } else {
        throw SchemaError("config: bc type must be 'fixed' or 'free_start', got '" + bct + "'");
    }

    if (j.contains("constraint")) {
        IsoperimetricConstraint c{lagrangian_from_json(j["constraint"].at("g")),
                                  require_number(j["constraint"], "xi")};
        prob.constraint = std::move(c);
    }
    prob.validate();
    return prob;
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {}

namespace {
std::string quote_csv(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}
} // namespace

std::string CsvWriter::number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    row(columns);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (columns_ != 0 && fields.size() != columns_)
        throw PreconditionError("CsvWriter: row width does not match the header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += quote_csv(fields[i]);
    }
    buffer_ += "\r\n";
}

void CsvWriter::close() {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw Error("CsvWriter: cannot open '" + path_ + "' for writing");
    out << buffer_;
    out.close();
    if (!out) throw Error("CsvWriter: write to '" + path_ + "' failed");
}

} // namespace genfrac
