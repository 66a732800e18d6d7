#include "cfinsler/dsl.hpp"

#include <cctype>
#include <cmath>
#include <set>

#include "cfinsler/errors.hpp"

namespace cfinsler::dsl {

namespace {

struct Token {
    enum Type { kIdent, kNumber, kSymbol, kEnd };
    Type type;
    std::string text;
    double value = 0.0;
    int line, column;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++pos_;
                ++line_;
                col_ = 1;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
                ++col_;
            } else {
                break;
            }
        }
        tok_.line = line_;
        tok_.column = col_;
        if (pos_ >= src_.size()) {
            tok_ = {Token::kEnd, "", 0.0, line_, col_};
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            tok_.type = Token::kIdent;
            tok_.text = src_.substr(start, pos_ - start);
            col_ += static_cast<int>(tok_.text.size());
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                                          src_[pos_] == '.'))
                ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t save = pos_++;
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
                if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                        ++pos_;
                } else {
                    pos_ = save;
                }
            }
            std::string text = src_.substr(start, pos_ - start);
            try {
                tok_.value = std::stod(text);
            } catch (...) {
                throw ParseError("bad number literal '" + text + "'", line_, col_);
            }
            tok_.type = Token::kNumber;
            tok_.text = text;
            col_ += static_cast<int>(text.size());
        } else if (std::string("+-*/^()=").find(c) != std::string::npos) {
            tok_.type = Token::kSymbol;
            tok_.text = std::string(1, c);
            ++pos_;
            ++col_;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        }
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

const std::set<std::string> kFunctions = {"exp", "log", "sqrt", "conj", "abs2", "re", "im"};
const std::set<std::string> kCoords = {"z1", "z2", "e1", "e2"};

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) {}

    Program run(const std::string& src) {
        Program p;
        p.source = src;
        std::set<std::string> bound = kCoords;
        while (lex_.peek().type == Token::kIdent && lex_.peek().text == "let") {
            lex_.take();
            Token name = expect(Token::kIdent, "name after 'let'");
            if (name.text == "let" || name.text == "L" || name.text == "i" ||
                kFunctions.count(name.text) || bound.count(name.text))
                throw ParseError("'" + name.text + "' cannot be bound by let", name.line,
                                 name.column);
            expect_symbol("=");
            ExprPtr e = expr(bound);
            p.lets.emplace_back(name.text, e);
            bound.insert(name.text);
        }
        Token l = expect(Token::kIdent, "'L ='");
        if (l.text != "L") throw ParseError("expected 'L ='", l.line, l.column);
        expect_symbol("=");
        p.body = expr(bound);
        Token end = lex_.take();
        if (end.type != Token::kEnd)
            throw ParseError("unexpected '" + end.text + "' after L expression", end.line,
                             end.column);
        check_lets_used(p);
        return p;
    }

private:
    Token expect(Token::Type type, const std::string& what) {
        Token t = lex_.take();
        if (t.type != type)
            throw ParseError("expected " + what, t.line, t.column);
        return t;
    }
    void expect_symbol(const std::string& s) {
        Token t = lex_.take();
        if (t.type != Token::kSymbol || t.text != s)
            throw ParseError("expected '" + s + "'", t.line, t.column);
    }
    bool eat_symbol(const std::string& s) {
        if (lex_.peek().type == Token::kSymbol && lex_.peek().text == s) {
            lex_.take();
            return true;
        }
        return false;
    }

    static std::shared_ptr<Expr> node(Expr::Kind k, const Token& at) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->line = at.line;
        e->column = at.column;
        return e;
    }

    ExprPtr expr(const std::set<std::string>& bound) {
        Token at = lex_.peek();
        ExprPtr e = term(bound);
        for (;;) {
            if (eat_symbol("+")) {
                auto n = node(Expr::kAdd, at);
                n->lhs = e;
                n->rhs = term(bound);
                e = n;
            } else if (eat_symbol("-")) {
                auto n = node(Expr::kSub, at);
                n->lhs = e;
                n->rhs = term(bound);
                e = n;
            } else {
                return e;
            }
        }
    }

    ExprPtr term(const std::set<std::string>& bound) {
        Token at = lex_.peek();
        ExprPtr e = factor(bound);
        for (;;) {
            if (eat_symbol("*")) {
                auto n = node(Expr::kMul, at);
                n->lhs = e;
                n->rhs = factor(bound);
                e = n;
            } else if (eat_symbol("/")) {
                auto n = node(Expr::kDiv, at);
                n->lhs = e;
                n->rhs = factor(bound);
                e = n;
            } else {
                return e;
            }
        }
    }

    ExprPtr factor(const std::set<std::string>& bound) {
        Token at = lex_.peek();
        ExprPtr e = base(bound);
        if (eat_symbol("^")) {
            bool neg = eat_symbol("-");
            Token p = expect(Token::kNumber, "real literal exponent");
            auto n = node(Expr::kPow, at);
            n->lhs = e;
            n->number = neg ? -p.value : p.value;
            e = n;
        }
        return e;
    }

    ExprPtr base(const std::set<std::string>& bound) {
        Token t = lex_.take();
        if (t.type == Token::kSymbol && t.text == "-") {
            auto n = node(Expr::kNeg, t);
            n->lhs = base(bound);
            return n;
        }
        if (t.type == Token::kSymbol && t.text == "(") {
            ExprPtr e = expr(bound);
            expect_symbol(")");
            return e;
        }
        if (t.type == Token::kNumber) {
            auto n = node(Expr::kNumber, t);
            n->number = t.value;
            return n;
        }
        if (t.type == Token::kIdent) {
            if (t.text == "i") return node(Expr::kImag, t);
            if (kFunctions.count(t.text)) {
                expect_symbol("(");
                auto n = node(Expr::kCall, t);
                n->name = t.text;
                n->lhs = expr(bound);
                expect_symbol(")");
                return n;
            }
            if (!bound.count(t.text))
                throw ParseError("unknown identifier '" + t.text + "'", t.line, t.column);
            auto n = node(Expr::kIdent, t);
            n->name = t.text;
            return n;
        }
        throw ParseError("expected expression, found '" + (t.type == Token::kEnd ? "end of input" : t.text) + "'",
                         t.line, t.column);
    }

    static void collect_uses(const ExprPtr& e, std::set<std::string>& used) {
        if (!e) return;
        if (e->kind == Expr::kIdent) used.insert(e->name);
        collect_uses(e->lhs, used);
        collect_uses(e->rhs, used);
    }

    void check_lets_used(const Program& p) {
        std::set<std::string> used;
        for (const auto& [name, e] : p.lets) collect_uses(e, used);
        collect_uses(p.body, used);
        for (const auto& [name, e] : p.lets)
            if (!used.count(name))
                throw ParseError("let binding '" + name + "' is never used", e->line, e->column);
    }

    Lexer lex_;
};

WJet eval_expr(const ExprPtr& e, const Env& env, int order) {
    switch (e->kind) {
        case Expr::kNumber:
            return WJet(order, Complex(e->number));
        case Expr::kImag:
            return WJet(order, Complex(0.0, 1.0));
        case Expr::kIdent:
            return env.at(e->name);
        case Expr::kNeg:
            return -eval_expr(e->lhs, env, order);
        case Expr::kAdd:
            return eval_expr(e->lhs, env, order) + eval_expr(e->rhs, env, order);
        case Expr::kSub:
            return eval_expr(e->lhs, env, order) - eval_expr(e->rhs, env, order);
        case Expr::kMul:
            return eval_expr(e->lhs, env, order) * eval_expr(e->rhs, env, order);
        case Expr::kDiv:
            return eval_expr(e->lhs, env, order) / eval_expr(e->rhs, env, order);
        case Expr::kPow: {
            WJet b = eval_expr(e->lhs, env, order);
            double p = e->number;
            double r = std::round(p);
            if (std::abs(p - r) < 1e-12 && std::abs(r) <= 16) {
                // integer powers by repeated multiplication, no branch cut
                int n = static_cast<int>(std::abs(r));
                WJet acc(order, Complex(1.0));
                for (int k = 0; k < n; ++k) acc = acc * b;
                return r >= 0 ? acc : reciprocal(acc);
            }
            return pow_real(b, p);
        }
        case Expr::kCall: {
            WJet a = eval_expr(e->lhs, env, order);
            if (e->name == "exp") return exp(a);
            if (e->name == "log") return log(a);
            if (e->name == "sqrt") return sqrt(a);
            if (e->name == "conj") return a.conjugate();
            if (e->name == "abs2") return a * a.conjugate();
            if (e->name == "re") return (a + a.conjugate()) * 0.5;
            return (a - a.conjugate()) * Complex(0.0, -0.5);  // im
        }
    }
    throw ParseError("internal: bad expression node", e->line, e->column);
}

}  // namespace

Program parse(const std::string& text) { return Parser(text).run(text); }

WJet eval(const Program& p, const Env& env) {
    int order = env.at("z1").order();
    Env scope = env;
    for (const auto& [name, e] : p.lets) scope.emplace(name, eval_expr(e, scope, order));
    return eval_expr(p.body, scope, order);
}

WJet eval(const Program& p, const Seeds& s) {
    Env env{{"z1", s.z[0]}, {"z2", s.z[1]}, {"e1", s.eta[0]}, {"e2", s.eta[1]}};
    return eval(p, env);
}

}  // namespace cfinsler::dsl
