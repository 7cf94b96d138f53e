#include "sagl/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"
#include "sagl/errors.hpp"

namespace sagl {

namespace {

unsigned vec_sum(const ExponentVec& v) {
    unsigned s = 0;
    for (unsigned e : v) s += e;
    return s;
}

}  // namespace

PolynomialPredicate::PolynomialPredicate(unsigned q, TermMap terms)
    : q_(q), terms_(std::move(terms)), total_degree_(0), arg_degree_(0) {
    if (q_ == 0) throw ParseError("ambient dimension q must be positive");
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (sgn(it->second) == 0) {
            it = terms_.erase(it);
            continue;
        }
        const auto& key = it->first;
        if (key.xexp.size() != q_ || key.yexp.size() != q_)
            throw ParseError("exponent vector length does not match q");
        unsigned dx = vec_sum(key.xexp);
        unsigned dy = vec_sum(key.yexp);
        total_degree_ = std::max(total_degree_, dx + dy);
        arg_degree_ = std::max({arg_degree_, dx, dy});
        ++it;
    }
    if (terms_.empty()) throw ParseError("zero polynomial");
}

Rational PolynomialPredicate::evaluate(const RatVec& x, const RatVec& y) const {
    if (x.size() != q_ || y.size() != q_)
        throw std::invalid_argument("PolynomialPredicate::evaluate: point dimension mismatch");
    Rational acc;
    Rational mono;
    for (const auto& [key, coef] : terms_) {
        mono = Rational(coef);
        for (unsigned i = 0; i < q_; ++i)
            for (unsigned e = 0; e < key.xexp[i]; ++e) mono *= x[i];
        for (unsigned i = 0; i < q_; ++i)
            for (unsigned e = 0; e < key.yexp[i]; ++e) mono *= y[i];
        acc += mono;
    }
    return acc;
}

PolynomialPredicate PolynomialPredicate::swapped() const {
    TermMap out;
    for (const auto& [key, coef] : terms_) out[TermKey{key.yexp, key.xexp}] = coef;
    return PolynomialPredicate(q_, std::move(out));
}

bool Family::edge(const RatVec& x, const RatVec& y) const {
    for (const auto& c : constraints) {
        bool sat = (sgn(c.pred.evaluate(x, y)) >= 0) != c.complement;
        if (!sat) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Parser.  Recursive descent over a token stream; polynomials are expanded
// into TermMap form as we go, so "(x1-y1)^2" comes out as monomials directly.
// ---------------------------------------------------------------------------

namespace {

struct Poly {
    TermMap terms;  // may hold zero coefficients transiently
};

Poly poly_const(unsigned q, const Int& c) {
    Poly p;
    TermKey key{ExponentVec(q, 0), ExponentVec(q, 0)};
    p.terms[key] = c;
    return p;
}

Poly poly_var(unsigned q, bool is_y, unsigned index) {
    Poly p;
    TermKey key{ExponentVec(q, 0), ExponentVec(q, 0)};
    (is_y ? key.yexp : key.xexp)[index] = 1;
    p.terms[key] = 1;
    return p;
}

void poly_add_inplace(Poly& a, const Poly& b, int factor) {
    for (const auto& [key, coef] : b.terms) a.terms[key] += factor * coef;
}

Poly poly_mul(const Poly& a, const Poly& b, unsigned q) {
    Poly out;
    for (const auto& [ka, ca] : a.terms) {
        if (sgn(ca) == 0) continue;
        for (const auto& [kb, cb] : b.terms) {
            if (sgn(cb) == 0) continue;
            TermKey key{ExponentVec(q), ExponentVec(q)};
            for (unsigned i = 0; i < q; ++i) {
                key.xexp[i] = ka.xexp[i] + kb.xexp[i];
                key.yexp[i] = ka.yexp[i] + kb.yexp[i];
            }
            out.terms[key] += ca * cb;
        }
    }
    return out;
}

struct Token {
    enum Kind { Number, Var, Plus, Minus, Star, Caret, LParen, RParen, Rel, End } kind;
    Int number;
    bool var_is_y = false;
    unsigned var_index = 0;  // 0-based
    std::string rel;
    std::size_t column;  // 1-based position in the logical line
};

class LineParser {
public:
    LineParser(const std::string& text, std::size_t line_no, unsigned q)
        : text_(text), line_(line_no), q_(q) {
        tokenize();
    }

    // poly REL poly
    std::pair<Poly, std::string> parse_inequality() {
        Poly lhs = parse_expr();
        if (peek().kind != Token::Rel)
            fail("expected comparison operator", peek().column);
        std::string rel = peek().rel;
        ++pos_;
        Poly rhs = parse_expr();
        if (peek().kind != Token::End) fail("trailing input after inequality", peek().column);
        poly_add_inplace(lhs, rhs, -1);  // lhs - rhs
        return {std::move(lhs), rel};
    }

private:
    const std::string& text_;
    std::size_t line_;
    unsigned q_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg, std::size_t col) {
        std::ostringstream os;
        os << "line " << line_ << ", column " << col << ": " << msg;
        throw ParseError(os.str(), line_, col);
    }

    const Token& peek() const { return tokens_[pos_]; }

    void tokenize() {
        std::size_t i = 0;
        while (i < text_.size()) {
            char c = text_[i];
            std::size_t col = i + 1;
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
                Token t;
                t.kind = Token::Number;
                t.number = Int(text_.substr(i, j - i));
                t.column = col;
                tokens_.push_back(std::move(t));
                i = j;
                continue;
            }
            if (c == 'x' || c == 'y') {
                std::size_t j = i + 1;
                while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
                if (j == i + 1) fail("variable needs an index (x1..xq, y1..yq)", col);
                unsigned long idx = std::stoul(text_.substr(i + 1, j - i - 1));
                if (idx < 1 || idx > q_) fail("variable index out of range 1..q", col);
                Token t;
                t.kind = Token::Var;
                t.var_is_y = (c == 'y');
                t.var_index = static_cast<unsigned>(idx - 1);
                t.column = col;
                tokens_.push_back(t);
                i = j;
                continue;
            }
            auto two = text_.substr(i, 2);
            if (two == ">=" || two == "<=" || two == "==") {
                tokens_.push_back(Token{Token::Rel, 0, false, 0, two, col});
                i += 2;
                continue;
            }
            switch (c) {
                case '+': tokens_.push_back(Token{Token::Plus, 0, false, 0, "", col}); break;
                case '-': tokens_.push_back(Token{Token::Minus, 0, false, 0, "", col}); break;
                case '*': tokens_.push_back(Token{Token::Star, 0, false, 0, "", col}); break;
                case '^': tokens_.push_back(Token{Token::Caret, 0, false, 0, "", col}); break;
                case '(': tokens_.push_back(Token{Token::LParen, 0, false, 0, "", col}); break;
                case ')': tokens_.push_back(Token{Token::RParen, 0, false, 0, "", col}); break;
                case '>': tokens_.push_back(Token{Token::Rel, 0, false, 0, ">", col}); break;
                case '<': tokens_.push_back(Token{Token::Rel, 0, false, 0, "<", col}); break;
                default: fail(std::string("unexpected character '") + c + "'", col);
            }
            ++i;
        }
        tokens_.push_back(Token{Token::End, 0, false, 0, "", text_.size() + 1});
    }

    Poly parse_expr() {
        int sign = 1;
        if (peek().kind == Token::Plus) ++pos_;
        else if (peek().kind == Token::Minus) {
            sign = -1;
            ++pos_;
        }
        Poly acc = parse_term();
        if (sign < 0) {
            Poly neg = poly_const(q_, 0);
            poly_add_inplace(neg, acc, -1);
            acc = std::move(neg);
        }
        while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
            int s = peek().kind == Token::Plus ? 1 : -1;
            ++pos_;
            Poly rhs = parse_term();
            poly_add_inplace(acc, rhs, s);
        }
        return acc;
    }

    Poly parse_term() {
        Poly acc = parse_power();
        while (peek().kind == Token::Star) {
            ++pos_;
            Poly rhs = parse_power();
            acc = poly_mul(acc, rhs, q_);
        }
        return acc;
    }

    Poly parse_power() {
        Poly base = parse_atom();
        if (peek().kind == Token::Caret) {
            std::size_t col = peek().column;
            ++pos_;
            if (peek().kind != Token::Number) fail("exponent must be a nonnegative integer", col);
            if (!peek().number.fits_uint_p()) fail("exponent too large", col);
            unsigned long e = peek().number.get_ui();
            ++pos_;
            Poly acc = poly_const(q_, 1);
            for (unsigned long k = 0; k < e; ++k) acc = poly_mul(acc, base, q_);
            return acc;
        }
        return base;
    }

    Poly parse_atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Token::Number: {
                Poly p = poly_const(q_, t.number);
                ++pos_;
                return p;
            }
            case Token::Var: {
                Poly p = poly_var(q_, t.var_is_y, t.var_index);
                ++pos_;
                return p;
            }
            case Token::LParen: {
                ++pos_;
                Poly p = parse_expr();
                if (peek().kind != Token::RParen) fail("expected ')'", peek().column);
                ++pos_;
                return p;
            }
            case Token::Minus: {
                ++pos_;
                Poly p = parse_atom();
                Poly neg = poly_const(q_, 0);
                poly_add_inplace(neg, p, -1);
                return neg;
            }
            default: fail("expected number, variable or '('", t.column);
        }
    }
};

// Strips comments and splits on newlines and ';'.  Keeps 1-based line numbers
// of the original text for error reporting.
std::vector<std::pair<std::size_t, std::string>> logical_lines(const std::string& text) {
    std::vector<std::pair<std::size_t, std::string>> out;
    std::size_t line_no = 1;
    std::string current;
    auto flush = [&]() {
        bool blank = current.find_first_not_of(" \t\r") == std::string::npos;
        if (!blank) out.emplace_back(line_no, current);
        current.clear();
    };
    for (char c : text) {
        if (c == '\n') {
            flush();
            ++line_no;
        } else if (c == ';') {
            flush();
        } else {
            current.push_back(c);
        }
    }
    flush();
    // strip comments
    for (auto& [ln, s] : out) {
        auto h = s.find('#');
        if (h != std::string::npos) s.erase(h);
    }
    std::erase_if(out, [](const auto& p) {
        return p.second.find_first_not_of(" \t\r") == std::string::npos;
    });
    return out;
}

TermMap negated(const TermMap& terms) {
    TermMap out;
    for (const auto& [key, coef] : terms) out[key] = -coef;
    return out;
}

}  // namespace

Family parse_family(const std::string& text) {
    auto lines = logical_lines(text);
    if (lines.empty()) throw ParseError("empty family spec");

    // header: q=<int>
    {
        const auto& [ln, s] = lines.front();
        std::size_t i = s.find_first_not_of(" \t");
        if (i == std::string::npos || s[i] != 'q')
            throw ParseError("first line must be q=<int>", ln, i + 1);
        std::size_t eq = s.find('=', i);
        if (eq == std::string::npos) throw ParseError("first line must be q=<int>", ln, i + 1);
        std::string rest = s.substr(eq + 1);
        try {
            long q = std::stol(rest);
            if (q < 1) throw ParseError("q must be >= 1", ln, eq + 2);
            Family fam;
            fam.q = static_cast<unsigned>(q);

            for (std::size_t k = 1; k < lines.size(); ++k) {
                const auto& [line_no, line_text] = lines[k];
                LineParser lp(line_text, line_no, fam.q);
                auto [poly, rel] = lp.parse_inequality();  // poly = lhs - rhs

                // Canonicalize to "f >= 0 xor complement".  Strict inequalities
                // use the complemented non-strict form of the opposite sign.
                auto push = [&](TermMap terms, bool complement) {
                    PolynomialPredicate pred(fam.q, std::move(terms));
                    if (!(pred.swapped() == pred)) {
                        std::ostringstream os;
                        os << "line " << line_no << ": predicate is not symmetric in x and y";
                        throw ParseError(os.str(), line_no);
                    }
                    fam.constraints.push_back(Constraint{std::move(pred), complement});
                };
                if (rel == ">=") push(poly.terms, false);
                else if (rel == "<=") push(negated(poly.terms), false);
                else if (rel == ">") push(negated(poly.terms), true);   // g>0 == !(-g>=0)
                else if (rel == "<") push(poly.terms, true);            // g<0 == !(g>=0)
                else {  // "=="
                    push(poly.terms, false);
                    push(negated(poly.terms), false);
                }
            }
            if (fam.constraints.empty())
                throw ParseError("family spec declares no inequalities");
            return fam;
        } catch (std::invalid_argument&) {
            throw ParseError("first line must be q=<int>", ln, eq + 2);
        }
    }
}

std::string constraint_to_json(const Constraint& c) {
    nlohmann::json j;
    j["q"] = c.pred.q();
    j["d"] = c.pred.total_degree();
    j["strict"] = c.complement;
    auto& terms = j["terms"] = nlohmann::json::array();
    for (const auto& [key, coef] : c.pred.terms()) {
        nlohmann::json t;
        t["xexp"] = key.xexp;
        t["yexp"] = key.yexp;
        t["coef"] = coef.get_str();
        terms.push_back(std::move(t));
    }
    return j.dump();
}

std::string family_to_json(const Family& f) {
    nlohmann::json j;
    j["q"] = f.q;
    auto& cs = j["constraints"] = nlohmann::json::array();
    for (const auto& c : f.constraints) cs.push_back(nlohmann::json::parse(constraint_to_json(c)));
    return j.dump();
}

}  // namespace sagl
