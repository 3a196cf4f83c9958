#pragma once

#include <memory>
#include <string>

namespace sft {

// Arithmetic expressions in one variable t:
//   numbers, t, pi, + - * /, ^ with a constant exponent, unary minus,
//   sin(.), cos(.), exp(.)
// with symbolic differentiation.
class Expr {
public:
    struct Node;

    static Expr parse(const std::string& text);

    double operator()(double t) const;
    Expr derivative() const;
    std::string str() const;

private:
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

// The argument itself, or the contents of the file it names.
std::string load_expression(const std::string& arg);

}  // namespace sft
