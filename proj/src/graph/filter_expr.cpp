#include "vecseg/graph/filter_expr.hpp"

#include <cctype>
#include <charconv>
#include <vector>

#include <fmt/format.h>

#include "vecseg/error.hpp"

namespace vecseg {

struct EdgePredicate::Node {
    enum class Kind { Feature, Number, Not, And, Or, Compare } kind = Kind::Number;
    int feature = 0;
    double number = 0.0;
    std::string op;  // comparison operator
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = EdgePredicate::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Token {
    enum class Kind { Name, Number, Op, LParen, RParen, End } kind = Kind::End;
    std::string text;
    double number = 0.0;
    std::size_t pos = 0;
};

[[noreturn]] void fail(std::size_t pos, const std::string& what) {
    throw Error(ErrorKind::BadFormat, fmt::format("filter expression, column {}: {}", pos + 1, what));
}

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            t.kind = Token::Kind::Name;
            t.text = s.substr(i, j - i);
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
            const auto [end, ec] = std::from_chars(s.data() + i, s.data() + s.size(), t.number);
            if (ec != std::errc{}) fail(i, "bad number");
            t.kind = Token::Kind::Number;
            t.text = s.substr(i, static_cast<std::size_t>(end - (s.data() + i)));
            i += t.text.size();
        } else if (c == '(' || c == ')') {
            t.kind = c == '(' ? Token::Kind::LParen : Token::Kind::RParen;
            t.text = std::string(1, c);
            ++i;
        } else {
            static constexpr std::string_view kOps[] = {"&&", "||", "==", "!=", "<=", ">=", "<", ">", "!"};
            bool matched = false;
            for (std::string_view op : kOps) {
                if (s.substr(i, op.size()) == op) {
                    t.kind = Token::Kind::Op;
                    t.text = op;
                    i += op.size();
                    matched = true;
                    break;
                }
            }
            if (!matched) fail(i, fmt::format("unexpected character '{}'", c));
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = s.size();
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    NodePtr parse() {
        NodePtr n = parse_or();
        if (peek().kind != Token::Kind::End) fail(peek().pos, fmt::format("unexpected '{}'", peek().text));
        return n;
    }

private:
    const Token& peek() const { return toks_[at_]; }
    bool accept_op(std::string_view op) {
        if (peek().kind == Token::Kind::Op && peek().text == op) {
            ++at_;
            return true;
        }
        return false;
    }

    static NodePtr binary(Node::Kind kind, NodePtr a, NodePtr b, std::string op = {}) {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        n->op = std::move(op);
        return n;
    }

    NodePtr parse_or() {
        NodePtr n = parse_and();
        while (accept_op("||")) n = binary(Node::Kind::Or, n, parse_and());
        return n;
    }

    NodePtr parse_and() {
        NodePtr n = parse_unary();
        while (accept_op("&&")) n = binary(Node::Kind::And, n, parse_unary());
        return n;
    }

    NodePtr parse_unary() {
        if (accept_op("!")) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Not;
            n->lhs = parse_unary();
            return n;
        }
        return parse_comparison();
    }

    NodePtr parse_comparison() {
        if (peek().kind == Token::Kind::LParen) {
            ++at_;
            NodePtr n = parse_or();
            if (peek().kind != Token::Kind::RParen) fail(peek().pos, "expected ')'");
            ++at_;
            return n;
        }
        NodePtr a = parse_operand();
        for (std::string_view op : {"==", "!=", "<=", ">=", "<", ">"}) {
            if (accept_op(op)) return binary(Node::Kind::Compare, a, parse_operand(), std::string(op));
        }
        if (a->kind == Node::Kind::Number) fail(peek().pos, "a bare number is not a condition");
        return a;
    }

    NodePtr parse_operand() {
        const Token& t = peek();
        auto n = std::make_shared<Node>();
        if (t.kind == Token::Kind::Number) {
            n->kind = Node::Kind::Number;
            n->number = t.number;
        } else if (t.kind == Token::Kind::Name) {
            n->kind = Node::Kind::Feature;
            n->feature = -1;
            for (std::size_t k = 0; k < kEdgeFeatureNames.size(); ++k)
                if (kEdgeFeatureNames[k] == t.text) n->feature = static_cast<int>(k);
            if (n->feature < 0) {
                std::string known;
                for (std::string_view name : kEdgeFeatureNames) known += fmt::format("{}{}", known.empty() ? "" : ", ", name);
                fail(t.pos, fmt::format("unknown edge feature '{}' (known: {})", t.text, known));
            }
        } else {
            fail(t.pos, t.kind == Token::Kind::End ? std::string("unexpected end of expression")
                                                   : fmt::format("unexpected '{}'", t.text));
        }
        ++at_;
        return n;
    }

    std::vector<Token> toks_;
    std::size_t at_ = 0;
};

double value(const Node& n, const EdgeFeatureVector& e) {
    return n.kind == Node::Kind::Feature ? e.values[static_cast<std::size_t>(n.feature)] : n.number;
}

bool eval(const Node& n, const EdgeFeatureVector& e) {
    switch (n.kind) {
        case Node::Kind::Feature: return value(n, e) != 0.0;
        case Node::Kind::Number: return n.number != 0.0;
        case Node::Kind::Not: return !eval(*n.lhs, e);
        case Node::Kind::And: return eval(*n.lhs, e) && eval(*n.rhs, e);
        case Node::Kind::Or: return eval(*n.lhs, e) || eval(*n.rhs, e);
        case Node::Kind::Compare: {
            const double a = value(*n.lhs, e), b = value(*n.rhs, e);
            if (n.op == "==") return a == b;
            if (n.op == "!=") return a != b;
            if (n.op == "<") return a < b;
            if (n.op == "<=") return a <= b;
            if (n.op == ">") return a > b;
            return a >= b;
        }
    }
    return false;
}

std::string show(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Feature: return std::string(kEdgeFeatureNames[static_cast<std::size_t>(n.feature)]);
        case Node::Kind::Number: return fmt::format("{}", n.number);
        case Node::Kind::Not: return fmt::format("!{}", show(*n.lhs));
        case Node::Kind::And: return fmt::format("({} && {})", show(*n.lhs), show(*n.rhs));
        case Node::Kind::Or: return fmt::format("({} || {})", show(*n.lhs), show(*n.rhs));
        case Node::Kind::Compare: return fmt::format("({} {} {})", show(*n.lhs), n.op, show(*n.rhs));
    }
    return {};
}

}  // namespace

EdgePredicate EdgePredicate::parse(std::string_view text) {
    EdgePredicate p;
    p.root_ = Parser(lex(text)).parse();
    return p;
}

bool EdgePredicate::operator()(const EdgeFeatureVector& e) const { return eval(*root_, e); }

std::string EdgePredicate::to_string() const { return show(*root_); }

}  // namespace vecseg
