#ifndef SAGL_POLYNOMIAL_HPP
#define SAGL_POLYNOMIAL_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sagl/rational.hpp"

namespace sagl {

// Exponent vector over one argument's coordinates, length q.
using ExponentVec = std::vector<unsigned>;

// One monomial x^a y^b of the two-argument polynomial.
struct TermKey {
    ExponentVec xexp;
    ExponentVec yexp;
    bool operator<(const TermKey& rhs) const {
        if (xexp != rhs.xexp) return xexp < rhs.xexp;
        return yexp < rhs.yexp;
    }
    bool operator==(const TermKey& rhs) const { return xexp == rhs.xexp && yexp == rhs.yexp; }
};

using TermMap = std::map<TermKey, Int>;

/// A symmetric integer polynomial f(x,y) on R^q x R^q.  Edge convention for
/// the enclosing constraint: pair satisfies it iff (f(x,y) >= 0) xor complement.
class PolynomialPredicate {
public:
    PolynomialPredicate(unsigned q, TermMap terms);

    unsigned q() const { return q_; }
    // Max total degree of any term, counting both arguments (d of the family spec).
    unsigned total_degree() const { return total_degree_; }
    // Max degree in one argument alone; this is the degree of the Veronese basis.
    unsigned arg_degree() const { return arg_degree_; }
    const TermMap& terms() const { return terms_; }

    Rational evaluate(const RatVec& x, const RatVec& y) const;

    // f with arguments swapped; f is symmetric iff swapped() == *this.
    PolynomialPredicate swapped() const;
    bool operator==(const PolynomialPredicate& rhs) const {
        return q_ == rhs.q_ && terms_ == rhs.terms_;
    }

private:
    unsigned q_;
    TermMap terms_;
    unsigned total_degree_;
    unsigned arg_degree_;
};

struct Constraint {
    PolynomialPredicate pred;
    // true when the source inequality was strict; the pair satisfies the
    // constraint iff (f >= 0) xor complement.
    bool complement;
};

// A semi-algebraic family: q plus one or more symmetric constraints, combined
// by conjunction.  Equalities in the source text arrive here as two
// non-strict constraints.
struct Family {
    unsigned q;
    std::vector<Constraint> constraints;

    bool edge(const RatVec& x, const RatVec& y) const;
};

// Grammar: first logical line "q=<int>"; each following logical line one
// inequality "<poly> (>=|>|<=|<|==) <poly>" over x1..xq, y1..yq with integer
// literals, + - * ^ and parentheses.  '#' starts a comment; ';' splits
// logical lines.  Throws ParseError with position on bad input, asymmetric
// predicates and identically-zero polynomials.
Family parse_family(const std::string& text);

// Canonical JSON export of one constraint:
// { "q":..,"d":..,"terms":[{"xexp":[..],"yexp":[..],"coef":"<int>"}],"strict":bool }
std::string constraint_to_json(const Constraint& c);
std::string family_to_json(const Family& f);

}  // namespace sagl

#endif
