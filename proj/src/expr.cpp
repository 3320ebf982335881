// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include "icnet/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "icnet/errors.hpp"
#include "icnet/simd/scalar_ops.hpp"

namespace icnet {

std::int32_t Expr::push(ExprNode n) {
    nodes_.push_back(n);
    return static_cast<std::int32_t>(nodes_.size() - 1);
}

std::int32_t Expr::constant(double v) {
    ExprNode n;
    n.kind = ExprKind::constant;
    n.value = v;
    return push(n);
}

std::int32_t Expr::variable(std::uint32_t k) {
    ExprNode n;
    n.kind = ExprKind::variable;
    n.var = k;
    return push(n);
}

std::int32_t Expr::unary(ExprKind kind, std::int32_t a) {
    ExprNode n;
    n.kind = kind;
    n.arg[0] = a;
    return push(n);
}

std::int32_t Expr::binary(ExprKind kind, std::int32_t a, std::int32_t b) {
    ExprNode n;
    n.kind = kind;
    n.arg[0] = a;
    n.arg[1] = b;
    return push(n);
}

std::int32_t Expr::select(std::int32_t p, std::int32_t q, std::int32_t a, std::int32_t b) {
    ExprNode n;
    n.kind = ExprKind::select;
    n.arg[0] = p;
    n.arg[1] = q;
    n.arg[2] = a;
    n.arg[3] = b;
    return push(n);
}

std::size_t Expr::arity() const {
    std::size_t m = 0;
    for (const ExprNode& n : nodes_) {
        if (n.kind == ExprKind::variable) {
            m = std::max<std::size_t>(m, n.var + 1);
        }
    }
    return m;
}

namespace {

constexpr int kMaxNesting = 2000;

class Parser {
  public:
    Parser(std::string_view text, std::size_t dim) : s_(text), dim_(dim) {}

    Expr run() {
        skip_ws();
        if (pos_ == s_.size()) {
            throw ParseError("empty expression", pos_);
        }
        const std::int32_t root = expr();
        skip_ws();
        if (pos_ != s_.size()) {
            throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        }
        e_.set_root(root);
        return std::move(e_);
    }

  private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])) != 0) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ == s_.size()) {
                throw ParseError(std::string("expected '") + c + "' but the expression ended", pos_);
            }
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    struct Nest {
        explicit Nest(Parser& p) : p_(p) {
            if (++p_.depth_ > kMaxNesting) {
                throw ParseError("expression nested too deeply", p_.pos_);
            }
        }
        ~Nest() { --p_.depth_; }
        Parser& p_;
    };

    std::int32_t expr() {
        Nest guard(*this);
        std::int32_t lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = e_.binary(ExprKind::add, lhs, term());
            } else if (accept('-')) {
                lhs = e_.binary(ExprKind::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    std::int32_t term() {
        std::int32_t lhs = unary();
        while (accept('*')) {
            lhs = e_.binary(ExprKind::mul, lhs, unary());
        }
        return lhs;
    }

    std::int32_t unary() {
        Nest guard(*this);
        if (accept('-')) {
            return e_.unary(ExprKind::neg, unary());
        }
        return primary();
    }

    std::int32_t primary() {
        skip_ws();
        if (pos_ == s_.size()) {
            throw ParseError("unexpected end of expression", pos_);
        }
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            const std::int32_t inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            return identifier();
        }
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    std::int32_t number() {
        const std::size_t start = pos_;
        const auto is_digit = [&](bool hex) {
            if (pos_ >= s_.size()) {
                return false;
            }
            const auto ch = static_cast<unsigned char>(s_[pos_]);
            return hex ? std::isxdigit(ch) != 0 : std::isdigit(ch) != 0;
        };
        const bool hex = s_.size() - pos_ >= 2 && s_[pos_] == '0' && (s_[pos_ + 1] == 'x' || s_[pos_ + 1] == 'X');
        if (hex) {
            pos_ += 2;
        }
        std::size_t mantissa = 0;
        while (is_digit(hex)) {
            ++pos_;
            ++mantissa;
        }
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (is_digit(hex)) {
                ++pos_;
                ++mantissa;
            }
        }
        if (mantissa == 0) {
            throw ParseError("malformed number", start);
        }
        const char exp_char = hex ? 'p' : 'e';
        if (pos_ < s_.size() && std::tolower(static_cast<unsigned char>(s_[pos_])) == exp_char) {
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                ++pos_;
            }
            if (!is_digit(false)) {
                throw ParseError("malformed exponent", start);
            }
            while (is_digit(false)) {
                ++pos_;
            }
        } else if (hex) {
            throw ParseError("hex-float literal needs a 'p' exponent", start);
        }
        if (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) != 0 || s_[pos_] == '_')) {
            throw ParseError("malformed number", start);
        }
        const std::string lexeme{s_.substr(start, pos_ - start)};
        char* end = nullptr;
        const double v = std::strtod(lexeme.c_str(), &end);
        if (end != lexeme.c_str() + lexeme.size() || !std::isfinite(v)) {
            throw ParseError("number out of range", start);
        }
        return e_.constant(v);
    }

    std::int32_t identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) != 0 || s_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view id = s_.substr(start, pos_ - start);
        if (id.size() >= 2 && id[0] == 'x' &&
            std::all_of(id.begin() + 1, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; })) {
            std::uint64_t k = 0;
            const auto [p, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), k);
            if (ec != std::errc{} || k >= dim_) {
                throw ParseError("variable " + std::string(id) + " out of range for dimension " + std::to_string(dim_),
                                 start);
            }
            return e_.variable(static_cast<std::uint32_t>(k));
        }
        std::size_t want = 0;
        ExprKind kind{};
        if (id == "min" || id == "max") {
            want = 2;
            kind = id == "min" ? ExprKind::min : ExprKind::max;
        } else if (id == "relu" || id == "abs") {
            want = 1;
            kind = id == "relu" ? ExprKind::relu : ExprKind::abs;
        } else {
            throw ParseError("unknown identifier '" + std::string(id) + "'", start);
        }
        expect('(');
        std::vector<std::int32_t> args;
        if (!accept(')')) {
            do {
                args.push_back(expr());
            } while (accept(','));
            expect(')');
        }
        if (args.size() != want) {
            throw ParseError(std::string(id) + " expects " + std::to_string(want) + " argument" +
                                 (want == 1 ? "" : "s") + ", got " + std::to_string(args.size()),
                             start);
        }
        return want == 1 ? e_.unary(kind, args[0]) : e_.binary(kind, args[0], args[1]);
    }

    std::string_view s_;
    std::size_t dim_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    Expr e_;
};

int precedence(const ExprNode& n) {
    switch (n.kind) {
    case ExprKind::add:
    case ExprKind::sub: return 1;
    case ExprKind::mul: return 2;
    case ExprKind::neg: return 3;
    default: return 4;
    }
}

void print(const Expr& e, std::int32_t i, std::string& out) {
    const ExprNode& n = e.node(i);
    const auto child = [&](std::int32_t c, bool paren) {
        if (paren) {
            out += '(';
        }
        print(e, c, out);
        if (paren) {
            out += ')';
        }
    };
    switch (n.kind) {
    case ExprKind::constant:
        if (std::signbit(n.value)) {
            out += '(' + format_real(n.value) + ')';
        } else {
            out += format_real(n.value);
        }
        break;
    case ExprKind::variable: out += 'x' + std::to_string(n.var); break;
    case ExprKind::neg:
        out += '-';
        child(n.arg[0], precedence(e.node(n.arg[0])) < 3);
        break;
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mul: {
        const int p = precedence(n);
        child(n.arg[0], precedence(e.node(n.arg[0])) < p);
        out += n.kind == ExprKind::add ? " + " : n.kind == ExprKind::sub ? " - " : "*";
        child(n.arg[1], precedence(e.node(n.arg[1])) <= p);
        break;
    }
    case ExprKind::min:
    case ExprKind::max:
        out += n.kind == ExprKind::min ? "min(" : "max(";
        print(e, n.arg[0], out);
        out += ", ";
        print(e, n.arg[1], out);
        out += ')';
        break;
    case ExprKind::relu:
    case ExprKind::abs:
        out += n.kind == ExprKind::relu ? "relu(" : "abs(";
        print(e, n.arg[0], out);
        out += ')';
        break;
    case ExprKind::select:
        out += "select(";
        for (int a = 0; a < 4; ++a) {
            if (a > 0) {
                out += ", ";
            }
            print(e, n.arg[a], out);
        }
        out += ')';
        break;
    }
}

Interval iv_mul(const Interval& x, const Interval& y) {
    const double p[4] = {x.lo() * y.lo(), x.lo() * y.hi(), x.hi() * y.lo(), x.hi() * y.hi()};
    return Interval{*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval iv_hull(const Interval& x, const Interval& y) {
    return Interval{std::min(x.lo(), y.lo()), std::max(x.hi(), y.hi())};
}

Interval iv_abs(const Interval& x) {
    if (x.lo() >= 0.0) {
        return x;
    }
    if (x.hi() <= 0.0) {
        return iv_neg(x);
    }
    return Interval{0.0, std::max(-x.lo(), x.hi())};
}

class Differentiator {
  public:
    Differentiator(const Expr& src, std::size_t k) : src_(src), k_(k), memo_(src.size(), -2) {
        // Start from a copy of the source so its node indices stay valid.
        for (std::size_t i = 0; i < src.size(); ++i) {
            const ExprNode& n = src.node(static_cast<std::int32_t>(i));
            switch (n.kind) {
            case ExprKind::constant: out_.constant(n.value); break;
            case ExprKind::variable: out_.variable(n.var); break;
            case ExprKind::neg:
            case ExprKind::relu:
            case ExprKind::abs: out_.unary(n.kind, n.arg[0]); break;
            case ExprKind::select: out_.select(n.arg[0], n.arg[1], n.arg[2], n.arg[3]); break;
            default: out_.binary(n.kind, n.arg[0], n.arg[1]); break;
            }
        }
    }

    Expr run() {
        out_.set_root(d(src_.root()));
        return std::move(out_);
    }

  private:
    std::int32_t zero() { return zero_ >= 0 ? zero_ : (zero_ = out_.constant(0.0)); }
    std::int32_t one() { return one_ >= 0 ? one_ : (one_ = out_.constant(1.0)); }
    bool is_const(std::int32_t i, double v) const {
        const ExprNode& n = out_.node(i);
        return n.kind == ExprKind::constant && n.value == v;
    }

    std::int32_t add(std::int32_t a, std::int32_t b) {
        if (is_const(a, 0.0)) {
            return b;
        }
        if (is_const(b, 0.0)) {
            return a;
        }
        return out_.binary(ExprKind::add, a, b);
    }

    std::int32_t neg(std::int32_t a) { return is_const(a, 0.0) ? zero() : out_.unary(ExprKind::neg, a); }

    std::int32_t mul(std::int32_t a, std::int32_t b) {
        if (is_const(a, 0.0) || is_const(b, 0.0)) {
            return zero();
        }
        if (is_const(a, 1.0)) {
            return b;
        }
        if (is_const(b, 1.0)) {
            return a;
        }
        return out_.binary(ExprKind::mul, a, b);
    }

    std::int32_t select(std::int32_t p, std::int32_t q, std::int32_t a, std::int32_t b) {
        if (is_const(a, 0.0) && is_const(b, 0.0)) {
            return zero();
        }
        return out_.select(p, q, a, b);
    }

    std::int32_t d(std::int32_t i) {
        std::int32_t& m = memo_[static_cast<std::size_t>(i)];
        if (m != -2) {
            return m;
        }
        const ExprNode n = src_.node(i);
        std::int32_t r = -1;
        switch (n.kind) {
        case ExprKind::constant: r = zero(); break;
        case ExprKind::variable: r = n.var == k_ ? one() : zero(); break;
        case ExprKind::neg: r = neg(d(n.arg[0])); break;
        case ExprKind::add: r = add(d(n.arg[0]), d(n.arg[1])); break;
        case ExprKind::sub: {
            const std::int32_t da = d(n.arg[0]);
            const std::int32_t db = d(n.arg[1]);
            if (is_const(db, 0.0)) {
                r = da;
            } else if (is_const(da, 0.0)) {
                r = neg(db);
            } else {
                r = out_.binary(ExprKind::sub, da, db);
            }
            break;
        }
        case ExprKind::mul: r = add(mul(d(n.arg[0]), n.arg[1]), mul(n.arg[0], d(n.arg[1]))); break;
        case ExprKind::min: r = select(n.arg[0], n.arg[1], d(n.arg[0]), d(n.arg[1])); break;
        case ExprKind::max: r = select(n.arg[0], n.arg[1], d(n.arg[1]), d(n.arg[0])); break;
        case ExprKind::relu: r = select(n.arg[0], zero(), zero(), d(n.arg[0])); break;
        case ExprKind::abs: {
            const std::int32_t da = d(n.arg[0]);
            r = select(n.arg[0], zero(), neg(da), da);
            break;
        }
        case ExprKind::select: throw std::invalid_argument("cannot differentiate a select node");
        }
        memo_[static_cast<std::size_t>(i)] = r;
        return r;
    }

    const Expr& src_;
    std::size_t k_;
    std::vector<std::int32_t> memo_;
    Expr out_;
    std::int32_t zero_ = -1;
    std::int32_t one_ = -1;
};

void emit(const Expr& e, std::int32_t i, std::size_t num_vars, Program& p, std::size_t& depth) {
    const ExprNode& n = e.node(i);
    simd::Op op{};
    switch (n.kind) {
    case ExprKind::constant:
        op.code = simd::OpCode::constant;
        op.value = n.value;
        break;
    case ExprKind::variable:
        if (n.var >= num_vars) {
            throw DimensionError("variable x" + std::to_string(n.var) + " out of range");
        }
        op.code = simd::OpCode::variable;
        op.index = n.var;
        break;
    case ExprKind::neg: op.code = simd::OpCode::neg; break;
    case ExprKind::relu: op.code = simd::OpCode::relu; break;
    case ExprKind::abs: op.code = simd::OpCode::abs; break;
    case ExprKind::add: op.code = simd::OpCode::add; break;
    case ExprKind::sub: op.code = simd::OpCode::sub; break;
    case ExprKind::mul: op.code = simd::OpCode::mul; break;
    case ExprKind::min: op.code = simd::OpCode::min; break;
    case ExprKind::max: op.code = simd::OpCode::max; break;
    case ExprKind::select: throw std::invalid_argument("select nodes cannot be compiled");
    }
    switch (n.kind) {
    case ExprKind::constant:
    case ExprKind::variable:
        ++depth;
        break;
    case ExprKind::neg:
    case ExprKind::relu:
    case ExprKind::abs: emit(e, n.arg[0], num_vars, p, depth); break;
    default:
        emit(e, n.arg[0], num_vars, p, depth);
        emit(e, n.arg[1], num_vars, p, depth);
        --depth;
        break;
    }
    p.max_stack = std::max(p.max_stack, depth);
    p.ops.push_back(op);
}

} // namespace

Expr parse_expr(std::string_view text, std::size_t dim) { return Parser(text, dim).run(); }

FuncExpr parse(std::string_view text, std::size_t dim, const BoxRegion& domain) {
    if (domain.dim() != dim) {
        throw DimensionError("domain has dimension " + std::to_string(domain.dim()) + ", expected " +
                             std::to_string(dim));
    }
    FuncExpr f;
    f.expr = parse_expr(text, dim);
    f.dim = dim;
    f.domain = domain;
    f.lipschitz = lipschitz_bound(f.expr, domain);
    f.source = std::string(text);
    return f;
}

std::string format_real(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string to_string(const Expr& e) {
    std::string out;
    if (!e.empty()) {
        print(e, e.root(), out);
    }
    return out;
}

double eval(const Expr& e, std::span<const double> x) {
    std::vector<double> v(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const ExprNode& n = e.node(static_cast<std::int32_t>(i));
        const auto a = [&](int j) { return v[static_cast<std::size_t>(n.arg[j])]; };
        switch (n.kind) {
        case ExprKind::constant: v[i] = n.value; break;
        case ExprKind::variable:
            if (n.var >= x.size()) {
                throw DimensionError("variable x" + std::to_string(n.var) + " out of range");
            }
            v[i] = x[n.var];
            break;
        case ExprKind::neg: v[i] = -a(0); break;
        case ExprKind::add: v[i] = a(0) + a(1); break;
        case ExprKind::sub: v[i] = a(0) - a(1); break;
        case ExprKind::mul: v[i] = a(0) * a(1); break;
        case ExprKind::min: v[i] = simd::select_min(a(0), a(1)); break;
        case ExprKind::max: v[i] = simd::select_max(a(0), a(1)); break;
        case ExprKind::relu: v[i] = relu(a(0)); break;
        case ExprKind::abs: v[i] = simd::abs_value(a(0)); break;
        case ExprKind::select: v[i] = a(0) > a(1) ? a(3) : a(2); break;
        }
    }
    return v[static_cast<std::size_t>(e.root())];
}

double eval(const FuncExpr& f, std::span<const double> x) {
    if (x.size() != f.dim) {
        throw DimensionError("expected a point of dimension " + std::to_string(f.dim) + ", got " +
                             std::to_string(x.size()));
    }
    return eval(f.expr, x);
}

Interval eval_interval(const Expr& e, const BoxRegion& box) {
    std::vector<Interval> v;
    v.reserve(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const ExprNode& n = e.node(static_cast<std::int32_t>(i));
        const auto a = [&](int j) -> const Interval& { return v[static_cast<std::size_t>(n.arg[j])]; };
        switch (n.kind) {
        case ExprKind::constant: v.push_back(Interval::point(n.value)); break;
        case ExprKind::variable:
            if (n.var >= box.dim()) {
                throw DimensionError("variable x" + std::to_string(n.var) + " out of range");
            }
            v.push_back(box[n.var]);
            break;
        case ExprKind::neg: v.push_back(iv_neg(a(0))); break;
        case ExprKind::add: v.push_back(iv_add(a(0), a(1))); break;
        case ExprKind::sub: v.push_back(iv_add(a(0), iv_neg(a(1)))); break;
        case ExprKind::mul: v.push_back(iv_mul(a(0), a(1))); break;
        case ExprKind::min:
            v.push_back(Interval{std::min(a(0).lo(), a(1).lo()), std::min(a(0).hi(), a(1).hi())});
            break;
        case ExprKind::max:
            v.push_back(Interval{std::max(a(0).lo(), a(1).lo()), std::max(a(0).hi(), a(1).hi())});
            break;
        case ExprKind::relu: v.push_back(iv_relu(a(0))); break;
        case ExprKind::abs: v.push_back(iv_abs(a(0))); break;
        case ExprKind::select:
            if (a(0).hi() < a(1).lo()) {
                v.push_back(a(2));
            } else if (a(0).lo() > a(1).hi()) {
                v.push_back(a(3));
            } else {
                v.push_back(iv_hull(a(2), a(3)));
            }
            break;
        }
    }
    return v[static_cast<std::size_t>(e.root())];
}

Expr derivative(const Expr& e, std::size_t k) { return Differentiator(e, k).run(); }

double lipschitz_bound(const Expr& e, const BoxRegion& domain) {
    const std::size_t m = domain.dim();
    if (e.arity() > m) {
        throw DimensionError("expression uses more variables than the domain has");
    }
    std::vector<Expr> grads;
    for (std::size_t k = 0; k < m; ++k) {
        grads.push_back(derivative(e, k));
    }
    const auto per_axis =
        static_cast<std::size_t>(std::max(1.0, std::floor(std::pow(4096.0, 1.0 / static_cast<double>(m)) + 1e-9)));
    std::vector<std::size_t> idx(m, 0);
    double best = 0.0;
    for (;;) {
        std::vector<Interval> piece;
        piece.reserve(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double lo = domain[k].lo();
            const double w = domain[k].width();
            const double a = lo + w * static_cast<double>(idx[k]) / static_cast<double>(per_axis);
            const double b = idx[k] + 1 == per_axis ? domain[k].hi()
                                                     : lo + w * static_cast<double>(idx[k] + 1) / static_cast<double>(per_axis);
            piece.emplace_back(a, std::max(a, b));
        }
        const BoxRegion box{std::move(piece)};
        double total = 0.0;
        for (const Expr& g : grads) {
            const Interval d = eval_interval(g, box);
            total += std::max(std::fabs(d.lo()), std::fabs(d.hi()));
        }
        best = std::max(best, total);
        std::size_t k = 0;
        while (k < m && ++idx[k] == per_axis) {
            idx[k++] = 0;
        }
        if (k == m) {
            break;
        }
    }
    return best;
}

Program compile(const Expr& e, std::size_t num_vars) {
    if (e.empty()) {
        throw std::invalid_argument("cannot compile an empty expression");
    }
    Program p;
    p.num_vars = num_vars;
    std::size_t depth = 0;
    emit(e, e.root(), num_vars, p, depth);
    return p;
}

} // namespace icnet
