#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "attractorlab/errors.hpp"
#include "attractorlab/grid.hpp"

namespace attractorlab {

struct ExprError : ConfigError {
    std::size_t offset;
    ExprError(const std::string& msg, std::size_t off)
        : ConfigError(msg + " at offset " + std::to_string(off)), offset(off) {}
};

namespace detail {
struct ExprNode;
}

// Parsed coefficient expression over variables x, y with the functions
// sin, cos, exp, abs, sqrt, tanh, min, max. '+'-'*'-'/' are left-associative,
// '^' is right-associative, and unary minus binds to the atom, so -x^2 means
// (-x)^2.
class Expr {
  public:
    Expr() = default;
    double eval(double x, double y = 0.0) const;
    std::string print() const;
    bool operator==(const Expr& other) const;

  private:
    friend Expr parse_expr(std::string_view);
    explicit Expr(std::shared_ptr<const detail::ExprNode> root) : root_(std::move(root)) {}
    std::shared_ptr<const detail::ExprNode> root_;
};

Expr parse_expr(std::string_view text);

// Samples an expression on grid nodes; non-finite values raise ConfigError
// naming the node coordinates.
Field sample_expr(const Grid& g, const Expr& e);
// Samples at interface coordinates of one axis.
StaggeredField sample_expr_staggered(const Grid& g, const Expr& e);

}  // namespace attractorlab
