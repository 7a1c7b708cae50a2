#pragma once

// Exact symbolic scalars: multivariate polynomials with arbitrary-precision
// rational coefficients, and ratios of such polynomials.  These are the entry
// type of every symbolic matrix and edge label in the library.  Values are
// immutable after construction and safe to copy/share across threads.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace steadykernel {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse failure with 1-based source position.
struct parse_error : error {
    int line;
    int column;
    parse_error(const std::string& msg, int line_, int column_)
        : error(msg + " (line " + std::to_string(line_) + ", column " +
                std::to_string(column_) + ")"),
          line(line_),
          column(column_) {}
};

inline Rational rational_pow(const Rational& base, int exp) {
    if (exp < 0) throw error("negative exponent in exact evaluation");
    Rational r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

// Parses "3", "-3", "3/4", "0.25" into an exact rational.
inline Rational parse_rational(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw error("empty numeric literal");
    bool neg = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') neg = (s[pos++] == '-');
    auto digits = [&](std::size_t& p) {
        std::string d;
        while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) d += s[p++];
        return d;
    };
    std::string ip = digits(pos);
    Rational value;
    if (pos < s.size() && s[pos] == '/') {
        ++pos;
        std::string dp = digits(pos);
        if (ip.empty() || dp.empty() || pos != s.size())
            throw error("malformed rational literal: " + text);
        BigInt den(dp);
        if (den == 0) throw error("zero denominator in literal: " + text);
        value = Rational(BigInt(ip), den);
    } else if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::string fp = digits(pos);
        if ((ip.empty() && fp.empty()) || pos != s.size())
            throw error("malformed decimal literal: " + text);
        BigInt scale = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
        value = Rational(BigInt(ip.empty() ? "0" : ip) * scale + BigInt(fp.empty() ? "0" : fp),
                         scale);
    } else {
        if (ip.empty() || pos != s.size())
            throw error("malformed integer literal: " + text);
        value = Rational(BigInt(ip));
    }
    return neg ? Rational(-value) : value;
}

// ---------------------------------------------------------------------------
// Monomial: finite product of symbol^exponent, exponents >= 1, sorted by name.

class Monomial {
  public:
    Monomial() = default;

    static Monomial var(const std::string& name, int exp = 1) {
        if (exp < 0) throw error("monomial exponent must be non-negative");
        Monomial m;
        if (exp > 0) m.factors_.emplace_back(name, exp);
        return m;
    }

    const std::vector<std::pair<std::string, int>>& factors() const { return factors_; }
    bool is_unit() const { return factors_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [name, e] : factors_) d += e;
        return d;
    }

    Monomial operator*(const Monomial& o) const {
        Monomial r;
        auto a = factors_.begin(), ae = factors_.end();
        auto b = o.factors_.begin(), be = o.factors_.end();
        while (a != ae || b != be) {
            if (b == be || (a != ae && a->first < b->first))
                r.factors_.push_back(*a++);
            else if (a == ae || b->first < a->first)
                r.factors_.push_back(*b++);
            else {
                r.factors_.emplace_back(a->first, a->second + b->second);
                ++a, ++b;
            }
        }
        return r;
    }

    bool divides(const Monomial& o) const {
        auto b = o.factors_.begin(), be = o.factors_.end();
        for (const auto& [name, e] : factors_) {
            while (b != be && b->first < name) ++b;
            if (b == be || b->first != name || b->second < e) return false;
        }
        return true;
    }

    // Exact quotient; caller must ensure o.divides(*this).
    Monomial operator/(const Monomial& o) const {
        Monomial r;
        auto b = o.factors_.begin(), be = o.factors_.end();
        for (const auto& [name, e] : factors_) {
            int sub = 0;
            while (b != be && b->first < name) ++b;
            if (b != be && b->first == name) sub = b->second;
            if (sub > e) throw error("inexact monomial division");
            if (e - sub > 0) r.factors_.emplace_back(name, e - sub);
        }
        return r;
    }

    // Componentwise minimum (gcd of monomials).
    static Monomial gcd(const Monomial& x, const Monomial& y) {
        Monomial r;
        auto a = x.factors_.begin(), ae = x.factors_.end();
        auto b = y.factors_.begin(), be = y.factors_.end();
        while (a != ae && b != be) {
            if (a->first < b->first)
                ++a;
            else if (b->first < a->first)
                ++b;
            else {
                r.factors_.emplace_back(a->first, std::min(a->second, b->second));
                ++a, ++b;
            }
        }
        return r;
    }

    bool operator==(const Monomial& o) const { return factors_ == o.factors_; }

  private:
    std::vector<std::pair<std::string, int>> factors_;
};

// Graded lexicographic order: total degree first, then lexicographic with
// alphabetically earlier symbols dominant (a^2 > a*b > b^2).
// Returns <0, 0, >0 for a<b, a==b, a>b.
inline int monomial_cmp(const Monomial& a, const Monomial& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db ? -1 : 1;
    auto ia = a.factors().begin(), ae = a.factors().end();
    auto ib = b.factors().begin(), be = b.factors().end();
    while (ia != ae && ib != be) {
        if (ia->first != ib->first) return ia->first < ib->first ? 1 : -1;
        if (ia->second != ib->second) return ia->second > ib->second ? 1 : -1;
        ++ia, ++ib;
    }
    if (ia != ae) return 1;
    if (ib != be) return -1;
    return 0;
}

// Comparator putting the leading (largest) monomial first in a std::map.
struct MonomialLeadingFirst {
    bool operator()(const Monomial& a, const Monomial& b) const {
        return monomial_cmp(a, b) > 0;
    }
};

// ---------------------------------------------------------------------------
// Polynomial: canonical sum of coefficient*monomial, no zero coefficients,
// terms kept in descending graded-lex order.

class Polynomial {
  public:
    using TermMap = std::map<Monomial, Rational, MonomialLeadingFirst>;

    Polynomial() = default;
    Polynomial(int c) { if (c != 0) terms_[Monomial()] = c; }
    Polynomial(const Rational& c) { if (c != 0) terms_[Monomial()] = c; }

    static Polynomial variable(const std::string& name) {
        if (!is_identifier(name)) throw error("invalid symbol name: " + name);
        Polynomial p;
        p.terms_[Monomial::var(name)] = 1;
        return p;
    }

    static Polynomial term(const Rational& c, const Monomial& m) {
        Polynomial p;
        if (c != 0) p.terms_[m] = c;
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_unit());
    }
    // Value of a constant polynomial (zero polynomial -> 0).
    Rational constant_value() const {
        if (terms_.empty()) return 0;
        if (!is_constant()) throw error("polynomial is not constant");
        return terms_.begin()->second;
    }

    const Monomial& leading_monomial() const {
        if (terms_.empty()) throw error("zero polynomial has no leading term");
        return terms_.begin()->first;
    }
    const Rational& leading_coefficient() const {
        if (terms_.empty()) throw error("zero polynomial has no leading term");
        return terms_.begin()->second;
    }

    Polynomial operator-() const {
        Polynomial r(*this);
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }

    Polynomial& operator+=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    Polynomial operator+(const Polynomial& o) const { Polynomial r(*this); return r += o; }
    Polynomial operator-(const Polynomial& o) const { Polynomial r(*this); return r -= o; }

    Polynomial operator*(const Polynomial& o) const {
        Polynomial r;
        if (is_zero() || o.is_zero()) return r;
        for (const auto& [ma, ca] : terms_)
            for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    Polynomial pow(int e) const {
        if (e < 0) throw error("negative exponent on polynomial");
        Polynomial r(1);
        for (int i = 0; i < e; ++i) r *= *this;
        return r;
    }

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

    void collect_symbols(std::set<std::string>& out) const {
        for (const auto& [m, c] : terms_)
            for (const auto& [name, e] : m.factors()) out.insert(name);
    }

    // Partial substitution of symbols by exact rational constants; unbound
    // symbols remain symbolic.
    Polynomial subst(const std::map<std::string, Rational>& bindings) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            Rational coeff = c;
            Monomial rest;
            for (const auto& [name, e] : m.factors()) {
                auto it = bindings.find(name);
                if (it == bindings.end())
                    rest = rest * Monomial::var(name, e);
                else
                    coeff *= rational_pow(it->second, e);
            }
            r.add_term(rest, coeff);
        }
        return r;
    }

    // Full exact evaluation; every symbol must be bound.
    Rational eval(const std::map<std::string, Rational>& bindings) const {
        std::set<std::string> syms;
        collect_symbols(syms);
        for (const auto& s : syms)
            if (!bindings.count(s)) throw error("unbound symbol in evaluation: " + s);
        return subst(bindings).constant_value();
    }

    // gcd of coefficient numerators over lcm of denominators; positive, and 0
    // only for the zero polynomial.  Dividing by it yields integer coefficients
    // with overall gcd 1.
    Rational content() const {
        if (terms_.empty()) return 0;
        BigInt g = 0, l = 1;
        for (const auto& [m, c] : terms_) {
            g = boost::multiprecision::gcd(g, boost::multiprecision::numerator(c));
            l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(c));
        }
        if (g == 0) g = 1;
        return Rational(g, l);
    }

    // Componentwise-min monomial dividing every term (unit for constants).
    Monomial monomial_content() const {
        if (terms_.empty()) return Monomial();
        auto it = terms_.begin();
        Monomial g = it->first;
        for (++it; it != terms_.end() && !g.is_unit(); ++it)
            g = Monomial::gcd(g, it->first);
        return g;
    }

    // Multiplies every coefficient by q.
    Polynomial scaled(const Rational& q) const {
        Polynomial r;
        if (q == 0) return r;
        for (const auto& [m, c] : terms_) r.terms_[m] = c * q;
        return r;
    }

    // Divides every monomial by m; m must divide each term.
    Polynomial divided_by_monomial(const Monomial& m) const {
        Polynomial r;
        for (const auto& [mm, c] : terms_) r.terms_[mm / m] = c;
        return r;
    }

    std::string render() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            Rational a = c;
            if (first) {
                if (a < 0) { os << '-'; a = -a; }
                first = false;
            } else {
                os << (a < 0 ? " - " : " + ");
                if (a < 0) a = -a;
            }
            render_term(os, a, m);
        }
        return os.str();
    }

  private:
    static void render_term(std::ostringstream& os, const Rational& mag, const Monomial& m) {
        if (m.is_unit()) {
            os << rational_str(mag);
            return;
        }
        if (mag != 1) os << rational_str(mag) << '*';
        bool first = true;
        for (const auto& [name, e] : m.factors()) {
            if (!first) os << '*';
            first = false;
            os << name;
            if (e != 1) os << '^' << e;
        }
    }

    static std::string rational_str(const Rational& q) {
        BigInt n = boost::multiprecision::numerator(q);
        BigInt d = boost::multiprecision::denominator(q);
        if (d == 1) return n.str();
        return n.str() + "/" + d.str();
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    TermMap terms_;
};

// Exact polynomial quotient, or nullopt when the division is not exact.
// Used by fraction-free elimination, where exactness is guaranteed.
inline std::optional<Polynomial> divide_exact(const Polynomial& dividend,
                                              const Polynomial& divisor) {
    if (divisor.is_zero()) return std::nullopt;
    Polynomial q, r = dividend;
    const Monomial& dm = divisor.leading_monomial();
    const Rational& dc = divisor.leading_coefficient();
    while (!r.is_zero()) {
        const Monomial& rm = r.leading_monomial();
        if (!dm.divides(rm)) return std::nullopt;
        Polynomial t = Polynomial::term(r.leading_coefficient() / dc, rm / dm);
        q += t;
        r -= t * divisor;
    }
    return q;
}

// ---------------------------------------------------------------------------
// RationalExpr: quotient of two polynomials in canonical form.  Equality is
// decided by cross-multiplication, so no polynomial gcd is ever needed; the
// canonical form only cancels common monomial factors and normalizes scale
// (constant denominators fold into the numerator; otherwise coefficients are
// scaled to coprime integers with a positive leading denominator term).

class RationalExpr {
  public:
    RationalExpr() : num_(), den_(1) {}
    RationalExpr(int c) : num_(c), den_(1) {}
    RationalExpr(const Rational& c) : num_(c), den_(1) {}
    RationalExpr(const Polynomial& p) : num_(p), den_(1) {}
    RationalExpr(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
        normalize();
    }

    static RationalExpr variable(const std::string& name) {
        return RationalExpr(Polynomial::variable(name));
    }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rational constant_value() const {
        return num_.constant_value() / den_.constant_value();
    }

    RationalExpr operator-() const {
        RationalExpr r(*this);
        r.num_ = -r.num_;
        return r;
    }

    RationalExpr operator+(const RationalExpr& o) const {
        if (den_ == o.den_) return RationalExpr(num_ + o.num_, den_);
        return RationalExpr(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    RationalExpr operator-(const RationalExpr& o) const {
        if (den_ == o.den_) return RationalExpr(num_ - o.num_, den_);
        return RationalExpr(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
    }
    RationalExpr operator*(const RationalExpr& o) const {
        return RationalExpr(num_ * o.num_, den_ * o.den_);
    }
    RationalExpr operator/(const RationalExpr& o) const {
        if (o.is_zero()) throw error("division by structurally zero expression");
        return RationalExpr(num_ * o.den_, den_ * o.num_);
    }
    RationalExpr& operator+=(const RationalExpr& o) { return *this = *this + o; }
    RationalExpr& operator-=(const RationalExpr& o) { return *this = *this - o; }
    RationalExpr& operator*=(const RationalExpr& o) { return *this = *this * o; }
    RationalExpr& operator/=(const RationalExpr& o) { return *this = *this / o; }

    RationalExpr pow(int e) const {
        if (e < 0) return RationalExpr(1) / pow(-e);
        RationalExpr r(1);
        for (int i = 0; i < e; ++i) r *= *this;
        return r;
    }

    // Cross-multiplication equality: a/b == c/d  iff  a*d - c*b == 0.
    bool equals(const RationalExpr& o) const {
        return (num_ * o.den_ - o.num_ * den_).is_zero();
    }
    bool operator==(const RationalExpr& o) const { return equals(o); }

    // Structural identity of the canonical representation (used for
    // byte-determinism checks; equals() is the mathematical comparison).
    bool identical(const RationalExpr& o) const {
        return num_ == o.num_ && den_ == o.den_;
    }

    void collect_symbols(std::set<std::string>& out) const {
        num_.collect_symbols(out);
        den_.collect_symbols(out);
    }
    std::set<std::string> symbols() const {
        std::set<std::string> s;
        collect_symbols(s);
        return s;
    }

    RationalExpr subst(const std::map<std::string, Rational>& bindings) const {
        Polynomial d = den_.subst(bindings);
        if (d.is_zero()) throw error("substitution makes denominator zero");
        return RationalExpr(num_.subst(bindings), d);
    }

    Rational eval(const std::map<std::string, Rational>& bindings) const {
        Rational d = den_.eval(bindings);
        if (d == 0) throw error("denominator evaluates to zero");
        return num_.eval(bindings) / d;
    }

    std::string render() const {
        if (num_.is_zero()) return "0";
        if (den_.is_constant()) return num_.render();
        std::string n = num_.render();
        if (num_.terms().size() > 1) n = "(" + n + ")";
        std::string d = den_.render();
        if (!is_bare_atom(den_)) d = "(" + d + ")";
        return n + "/" + d;
    }

  private:
    // True when the polynomial renders as a single unscaled symbol, so it can
    // follow '/' without parentheses.
    static bool is_bare_atom(const Polynomial& p) {
        if (p.terms().size() != 1) return false;
        const auto& [m, c] = *p.terms().begin();
        return c == 1 && m.factors().size() == 1 && m.factors()[0].second == 1;
    }

    void normalize() {
        if (den_.is_zero()) throw error("division by structurally zero expression");
        if (num_.is_zero()) {
            den_ = Polynomial(1);
            return;
        }
        if (den_.is_constant()) {
            num_ = num_.scaled(Rational(1) / den_.constant_value());
            den_ = Polynomial(1);
            return;
        }
        Monomial mg = Monomial::gcd(num_.monomial_content(), den_.monomial_content());
        if (!mg.is_unit()) {
            num_ = num_.divided_by_monomial(mg);
            den_ = den_.divided_by_monomial(mg);
        }
        // Scale both parts by one rational so all coefficients become coprime
        // integers; sign chosen so the denominator's leading coefficient > 0.
        Rational cn = num_.content(), cd = den_.content();
        BigInt g = boost::multiprecision::gcd(boost::multiprecision::numerator(cn) *
                                                  boost::multiprecision::denominator(cd),
                                              boost::multiprecision::numerator(cd) *
                                                  boost::multiprecision::denominator(cn));
        Rational joint(g, boost::multiprecision::denominator(cn) *
                              boost::multiprecision::denominator(cd));
        Rational scale = Rational(1) / joint;
        if (den_.leading_coefficient() < 0) scale = -scale;
        num_ = num_.scaled(scale);
        den_ = den_.scaled(scale);
    }

    Polynomial num_, den_;
};

// ---------------------------------------------------------------------------
// Expression text format.  Grammar (used both standalone and for edge labels
// inside network files):
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := ('+' | '-')* primary ('^' INT)?
//   primary := IDENT | INT | '(' expr ')'
//
// IDENT = [A-Za-z_][A-Za-z0-9_]*, INT = [0-9]+.  render() output parses back
// to a symbolically equal value.

namespace detail {

class ExprParser {
  public:
    ExprParser(const std::string& text, int line, int col_offset)
        : text_(text), line_(line), col_offset_(col_offset) {}

    RationalExpr parse() {
        skip_ws();
        if (eof()) fail("empty expression");
        RationalExpr e = parse_expr();
        skip_ws();
        if (!eof()) fail(std::string("unexpected character '") + text_[pos_] + "'");
        return e;
    }

  private:
    RationalExpr parse_expr() {
        RationalExpr e = parse_term();
        for (;;) {
            skip_ws();
            if (peek('+')) { ++pos_; e += parse_term(); }
            else if (peek('-')) { ++pos_; e -= parse_term(); }
            else return e;
        }
    }

    RationalExpr parse_term() {
        RationalExpr e = parse_factor();
        for (;;) {
            skip_ws();
            if (peek('*')) { ++pos_; e *= parse_factor(); }
            else if (peek('/')) {
                std::size_t at = ++pos_;
                RationalExpr d = parse_factor();
                if (d.is_zero()) fail("division by zero", at);
                e /= d;
            } else return e;
        }
    }

    RationalExpr parse_factor() {
        skip_ws();
        bool neg = false;
        while (peek('+') || peek('-')) {
            if (text_[pos_] == '-') neg = !neg;
            ++pos_;
            skip_ws();
        }
        RationalExpr p = parse_primary();
        skip_ws();
        if (peek('^')) {
            ++pos_;
            skip_ws();
            std::size_t at = pos_;
            if (eof() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                fail("expected integer exponent after '^'", at);
            p = p.pow(parse_int());
        }
        return neg ? -p : p;
    }

    RationalExpr parse_primary() {
        skip_ws();
        if (eof()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            std::size_t at = pos_++;
            RationalExpr e = parse_expr();
            skip_ws();
            if (!peek(')')) fail("unbalanced '('", at);
            ++pos_;
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return RationalExpr(Rational(BigInt(parse_int_str())));
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name;
            while (!eof() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                              text_[pos_] == '_'))
                name += text_[pos_++];
            return RationalExpr::variable(name);
        }
        fail(std::string("unexpected character '") + c + "'");
        return RationalExpr();  // unreachable
    }

    std::string parse_int_str() {
        std::string d;
        while (!eof() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) d += text_[pos_++];
        return d;
    }

    int parse_int() {
        std::string d = parse_int_str();
        if (d.size() > 6) fail("exponent too large", pos_ - d.size());
        return std::stoi(d);
    }

    bool eof() const { return pos_ >= text_.size(); }
    bool peek(char c) const { return !eof() && text_[pos_] == c; }
    void skip_ws() {
        while (!eof() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }
    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw parse_error(msg, line_, col_offset_ + static_cast<int>(at) + 1);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_;
    int col_offset_;
};

}  // namespace detail

// line/col_offset locate `text` inside a larger source for diagnostics.
inline RationalExpr parse_expr(const std::string& text, int line = 1, int col_offset = 0) {
    return detail::ExprParser(text, line, col_offset).parse();
}

}  // namespace steadykernel
