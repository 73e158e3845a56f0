#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "genfrac/variational.hpp"

namespace genfrac {

/// Builds a kernel from its JSON description:
///   {"name": "riemann_liouville", "alpha": 0.5}
///   {"name": "custom", "expr": "exp(alpha*s)", "alpha": 0.5,
///    "kind": "difference", "singular": false}
/// Unknown names raise SchemaError listing the valid ones.
Kernel kernel_from_json(const nlohmann::json& j);

/// Lagrangian from expression strings over (t, y, u, v, w):
///   {"value": "(u+v)^2", "d2": "0", "d3": "2*(u+v)", "d4": "2*(u+v)", "d5": "0"}
Lagrangian lagrangian_from_json(const nlohmann::json& j);

/// Full variational problem document; see docs/problem_schema.md.
VariationalProblem problem_from_json(const nlohmann::json& j);

std::vector<std::string> builtin_kernel_names();

/// Deterministic CSV emission, RFC 4180 quoting, %.17g doubles.
class CsvWriter {
public:
    explicit CsvWriter(std::string path);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& fields);
    void close();

    static std::string number(double v);

private:
    std::string path_;
    std::string buffer_;
    std::size_t columns_ = 0;
};

} // namespace genfrac
