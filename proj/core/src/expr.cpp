#include "inspectre/expr.hpp"

namespace inspectre {

namespace {

const char* op_symbol(ExprOp op) {
    switch (op) {
    case ExprOp::Add: return "+";
    case ExprOp::Sub: return "-";
    case ExprOp::Mul: return "*";
    case ExprOp::And: return "&";
    case ExprOp::Or: return "|";
    case ExprOp::Eq: return "=";
    case ExprOp::Ne: return "!=";
    case ExprOp::Lt: return "<";
    case ExprOp::Ge: return ">=";
    default: return "?";
    }
}

}  // namespace

Expr::Expr() {
    static const auto zero = std::make_shared<const Node>();
    node_ = zero;
}

Expr Expr::lit(Word v) {
    auto n = std::make_shared<Node>();
    n->op = ExprOp::Lit;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::ref(Name name) {
    auto n = std::make_shared<Node>();
    n->op = ExprOp::Ref;
    n->name = name;
    return Expr(std::move(n));
}

Expr Expr::binary(ExprOp op, Expr a, Expr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return Expr(std::move(n));
}

Expr Expr::negate(Expr a) {
    auto n = std::make_shared<Node>();
    n->op = ExprOp::Not;
    n->args = {std::move(a)};
    return Expr(std::move(n));
}

Expr Expr::select(Expr cond, Expr then_e, Expr else_e) {
    auto n = std::make_shared<Node>();
    n->op = ExprOp::Select;
    n->args = {std::move(cond), std::move(then_e), std::move(else_e)};
    return Expr(std::move(n));
}

std::size_t Expr::arity() const {
    switch (node_->op) {
    case ExprOp::Lit:
    case ExprOp::Ref: return 0;
    case ExprOp::Not: return 1;
    case ExprOp::Select: return 3;
    default: return 2;
    }
}

Word Expr::apply(ExprOp op, Word a, Word b, Word mask) {
    switch (op) {
    case ExprOp::Add: return (a + b) & mask;
    case ExprOp::Sub: return (a - b) & mask;
    case ExprOp::Mul: return (a * b) & mask;
    case ExprOp::And: return a & b;
    case ExprOp::Or: return a | b;
    case ExprOp::Eq: return a == b ? 1 : 0;
    case ExprOp::Ne: return a != b ? 1 : 0;
    case ExprOp::Lt: return a < b ? 1 : 0;
    case ExprOp::Ge: return a >= b ? 1 : 0;
    default: return 0;
    }
}

void Expr::collect_names(NameSet& out) const {
    if (node_->op == ExprOp::Ref) {
        out.insert(node_->name);
        return;
    }
    for (std::size_t i = 0; i < arity(); ++i) node_->args[i].collect_names(out);
}

NameSet Expr::free_names() const {
    NameSet out;
    collect_names(out);
    return out;
}

Expr Expr::rename(const std::function<Name(Name)>& f) const {
    switch (node_->op) {
    case ExprOp::Lit: return *this;
    case ExprOp::Ref: return ref(f(node_->name));
    default: break;
    }
    auto n = std::make_shared<Node>(*node_);
    for (std::size_t i = 0; i < arity(); ++i) n->args[i] = node_->args[i].rename(f);
    return Expr(std::move(n));
}

std::string Expr::to_string(const std::function<std::string(Name)>& show) const {
    const Node& n = *node_;
    switch (n.op) {
    case ExprOp::Lit: return std::to_string(n.value);
    case ExprOp::Ref: return show(n.name);
    case ExprOp::Not: return "!" + n.args[0].to_string(show);
    case ExprOp::Select:
        return "sel(" + n.args[0].to_string(show) + ", " + n.args[1].to_string(show) + ", " +
               n.args[2].to_string(show) + ")";
    default:
        return "(" + n.args[0].to_string(show) + " " + op_symbol(n.op) + " " +
               n.args[1].to_string(show) + ")";
    }
}

std::string Expr::to_string() const {
    return to_string([](Name n) { return inspectre::to_string(n); });
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.op != y.op) return false;
    if (x.op == ExprOp::Lit) return x.value == y.value;
    if (x.op == ExprOp::Ref) return x.name == y.name;
    for (std::size_t i = 0; i < a.arity(); ++i) {
        if (!(x.args[i] == y.args[i])) return false;
    }
    return true;
}

std::optional<Word> eval_expr(const Expr& e, const Storage& s, Word mask) {
    return e.eval(
        [&s](Name n) -> std::optional<Word> {
            auto it = s.find(n);
            if (it == s.end()) return std::nullopt;
            return it->second;
        },
        mask);
}

Expr operator+(Expr a, Expr b) { return Expr::binary(ExprOp::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::binary(ExprOp::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::binary(ExprOp::Mul, std::move(a), std::move(b)); }

}  // namespace inspectre
