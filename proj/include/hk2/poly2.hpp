#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hk2/error.hpp"

namespace hk2 {

// Exponent vector; entry k is the exponent of the k-th declared variable.
using Monomial = std::vector<std::uint32_t>;

// Polynomial over the 2-element field, stored as a finite set of monomials.
// Terms are kept sorted (descending lexicographic) and duplicate-free;
// addition is symmetric difference, so even multiplicities cancel on
// construction.
class Poly2 {
 public:
  Poly2() = default;

  Poly2(std::vector<std::string> vars, std::vector<Monomial> terms)
      : vars_(std::move(vars)), terms_(std::move(terms)) {
    for (const auto& m : terms_)
      if (m.size() != vars_.size())
        throw precondition_error("monomial arity does not match variable list");
    normalize();
  }

  static Poly2 zero(std::vector<std::string> vars) { return Poly2(std::move(vars), {}); }

  static Poly2 one(std::vector<std::string> vars) {
    Monomial unit(vars.size(), 0);
    return Poly2(std::move(vars), {unit});
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  std::size_t var_count() const { return vars_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool has_constant_term() const {
    // terms are sorted descending, so the constant monomial can only be last
    return !terms_.empty() &&
           std::all_of(terms_.back().begin(), terms_.back().end(),
                       [](std::uint32_t e) { return e == 0; });
  }

  friend bool operator==(const Poly2&, const Poly2&) = default;

  friend Poly2 operator+(const Poly2& a, const Poly2& b) {
    a.require_same_vars(b);
    std::vector<Monomial> t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return Poly2(a.vars_, std::move(t));
  }

  friend Poly2 operator*(const Poly2& a, const Poly2& b) {
    a.require_same_vars(b);
    std::vector<Monomial> t;
    t.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ma : a.terms_)
      for (const auto& mb : b.terms_) {
        Monomial s(ma.size());
        for (std::size_t k = 0; k < s.size(); ++k) {
          const std::uint64_t e = std::uint64_t{ma[k]} + mb[k];
          if (e > std::numeric_limits<std::uint32_t>::max())
            throw precondition_error("monomial exponent overflow");
          s[k] = static_cast<std::uint32_t>(e);
        }
        t.push_back(std::move(s));
      }
    return Poly2(a.vars_, std::move(t));
  }

  // Frobenius: squaring doubles every exponent, term set unchanged.
  Poly2 squared() const {
    Poly2 r = *this;
    for (auto& m : r.terms_)
      for (auto& e : m) {
        if (e > std::numeric_limits<std::uint32_t>::max() / 2)
          throw precondition_error("monomial exponent overflow");
        e *= 2;
      }
    return r;
  }

  Poly2 pow(std::uint64_t k) const {
    Poly2 result = one(vars_);
    Poly2 base = *this;
    while (k) {
      if (k & 1) result = result * base;
      k >>= 1;
      if (k) base = base.squared();
    }
    return result;
  }

  // Canonical text: terms in stored order, '*' between factors, '^' powers.
  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (i) out += '+';
      out += monomial_string(terms_[i]);
    }
    return out;
  }

  // Unambiguous key for persisted records: the variable list matters because
  // the colength of the same text over more variables is different.
  std::string cache_key() const {
    std::string out;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (i) out += ';';
      out += vars_[i];
    }
    out += '|';
    out += to_string();
    return out;
  }

 private:
  std::string monomial_string(const Monomial& m) const {
    std::string out;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (!m[k]) continue;
      if (!out.empty()) out += '*';
      out += vars_[k];
      if (m[k] > 1) {
        out += '^';
        out += std::to_string(m[k]);
      }
    }
    return out.empty() ? "1" : out;
  }

  void require_same_vars(const Poly2& o) const {
    if (vars_ != o.vars_)
      throw precondition_error("polynomials use different variable lists");
  }

  void normalize() {
    std::sort(terms_.begin(), terms_.end(), std::greater<Monomial>());
    std::vector<Monomial> out;
    for (std::size_t i = 0; i < terms_.size();) {
      std::size_t j = i;
      while (j < terms_.size() && terms_[j] == terms_[i]) ++j;
      if ((j - i) % 2) out.push_back(terms_[i]);
      i = j;
    }
    terms_ = std::move(out);
  }

  std::vector<std::string> vars_;
  std::vector<Monomial> terms_;
};

namespace detail {

inline bool valid_var_name(const std::string& v) {
  if (v.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_')) return false;
  for (char c : v)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

}  // namespace detail

// Parses a sum of monomials over the declared variables, e.g.
// "x^3+y^3+x*y*z".  '*' between factors is optional (longest declared name
// wins on juxtaposition); integer constants are reduced mod 2; '-' is
// accepted as a synonym for '+'.
inline Poly2 parse_poly(const std::string& text, const std::vector<std::string>& vars) {
  for (const auto& v : vars) {
    if (!detail::valid_var_name(v))
      throw parse_error("invalid variable name: '" + v + "'");
    if (std::count(vars.begin(), vars.end(), v) != 1)
      throw parse_error("duplicate variable name: '" + v + "'");
  }

  std::size_t pos = 0;
  const auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  const auto match_var = [&]() -> int {
    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < vars.size(); ++k)
      if (vars[k].size() > best_len && text.compare(pos, vars[k].size(), vars[k]) == 0) {
        best = static_cast<int>(k);
        best_len = vars[k].size();
      }
    return best;
  };

  std::vector<Monomial> terms;
  skip_ws();
  if (pos == text.size()) throw parse_error("empty polynomial text");

  for (;;) {
    Monomial m(vars.size(), 0);
    bool term_vanishes = false;
    bool any_factor = false;
    for (;;) {
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        if (!any_factor) throw parse_error("'*' without a preceding factor");
        ++pos;
        skip_ws();
        if (pos == text.size() || text[pos] == '+' || text[pos] == '-')
          throw parse_error("'*' without a following factor");
      }
      if (pos == text.size() || text[pos] == '+' || text[pos] == '-') break;
      const char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t last = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) last = pos++;
        if ((text[last] - '0') % 2 == 0) term_vanishes = true;
        if (pos < text.size() && text[pos] == '^')
          throw parse_error("exponent on an integer constant");
        any_factor = true;
        continue;
      }
      const int v = match_var();
      if (v < 0)
        throw parse_error("unknown variable near '" + text.substr(pos, 8) + "'");
      pos += vars[static_cast<std::size_t>(v)].size();
      std::uint64_t e = 1;
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        skip_ws();
        if (pos == text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
          throw parse_error("malformed exponent");
        e = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          e = e * 10 + static_cast<std::uint64_t>(text[pos] - '0');
          if (e > std::numeric_limits<std::uint32_t>::max())
            throw parse_error("malformed exponent: too large");
          ++pos;
        }
      }
      const std::uint64_t total = e + m[static_cast<std::size_t>(v)];
      if (total > std::numeric_limits<std::uint32_t>::max())
        throw parse_error("malformed exponent: too large");
      m[static_cast<std::size_t>(v)] = static_cast<std::uint32_t>(total);
      any_factor = true;
    }
    if (!any_factor) throw parse_error("empty term");
    if (!term_vanishes) terms.push_back(std::move(m));
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] == '+' || text[pos] == '-') {
      ++pos;
      continue;
    }
    throw parse_error(std::string("unexpected character '") + text[pos] + "'");
  }
  return Poly2(vars, std::move(terms));
}

}  // namespace hk2
