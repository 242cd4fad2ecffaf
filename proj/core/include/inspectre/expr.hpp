#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "inspectre/name.hpp"

namespace inspectre {

enum class ExprOp : std::uint8_t {
    Lit,
    Ref,
    Add,
    Sub,
    Mul,
    And,  // bitwise, coincides with logical and on {0,1}
    Or,
    Eq,
    Ne,
    Lt,
    Ge,
    Not,  // logical: 0 -> 1, anything else -> 0
    Select,
};

// Immutable expression tree over literals and name references.
class Expr {
public:
    Expr();  // literal 0

    static Expr lit(Word v);
    static Expr ref(Name n);
    static Expr binary(ExprOp op, Expr a, Expr b);
    static Expr negate(Expr a);
    static Expr select(Expr cond, Expr then_e, Expr else_e);

    ExprOp op() const;
    bool is_lit() const;
    bool is_ref() const;
    Word literal() const;
    Name name() const;
    const Expr& arg(std::size_t i) const;
    std::size_t arity() const;

    // Strict evaluation: absent iff some free name is absent.
    template <class Lookup>
    std::optional<Word> eval(const Lookup& lookup, Word mask) const;

    void collect_names(NameSet& out) const;
    NameSet free_names() const;

    // Applies f to every referenced name, producing a new tree.
    Expr rename(const std::function<Name(Name)>& f) const;

    std::string to_string(const std::function<std::string(Name)>& show) const;
    std::string to_string() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Word apply(ExprOp op, Word a, Word b, Word mask);

    std::shared_ptr<const Node> node_;
};

struct Expr::Node {
    ExprOp op = ExprOp::Lit;
    Word value = 0;
    Name name{};
    std::vector<Expr> args;
};

inline ExprOp Expr::op() const { return node_->op; }
inline bool Expr::is_lit() const { return node_->op == ExprOp::Lit; }
inline bool Expr::is_ref() const { return node_->op == ExprOp::Ref; }
inline Word Expr::literal() const { return node_->value; }
inline Name Expr::name() const { return node_->name; }
inline const Expr& Expr::arg(std::size_t i) const { return node_->args[i]; }

std::optional<Word> eval_expr(const Expr& e, const Storage& s, Word mask = ~Word{0});

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);

template <class Lookup>
std::optional<Word> Expr::eval(const Lookup& lookup, Word mask) const {
    const Node& n = *node_;
    switch (n.op) {
    case ExprOp::Lit:
        return n.value & mask;
    case ExprOp::Ref:
        return lookup(n.name);
    case ExprOp::Not: {
        auto a = n.args[0].eval(lookup, mask);
        if (!a) return std::nullopt;
        return *a == 0 ? Word{1} : Word{0};
    }
    case ExprOp::Select: {
        auto c = n.args[0].eval(lookup, mask);
        auto a = n.args[1].eval(lookup, mask);
        auto b = n.args[2].eval(lookup, mask);
        if (!c || !a || !b) return std::nullopt;
        return *c != 0 ? *a : *b;
    }
    default: {
        auto a = n.args[0].eval(lookup, mask);
        auto b = n.args[1].eval(lookup, mask);
        if (!a || !b) return std::nullopt;
        return apply(n.op, *a, *b, mask);
    }
    }
}

}  // namespace inspectre
