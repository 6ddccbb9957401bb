#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "segre/errors.hpp"
#include "segre/series.hpp"

namespace segre {

// Names of the variables of a series ring, in index order.
class VariableTable {
 public:
  VariableTable() = default;
  explicit VariableTable(std::vector<std::string> names) {
    for (auto& n : names) add(std::move(n));
  }

  std::size_t add(std::string name) {
    if (name == "i") throw StructuralError("'i' is reserved for the imaginary unit");
    auto [it, inserted] = index_.emplace(name, names_.size());
    if (!inserted) throw StructuralError("duplicate variable name " + name);
    names_.push_back(std::move(name));
    return it->second;
  }

  std::size_t arity() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  const std::size_t* find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &it->second;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> index_;
};

namespace detail {

// Recursive-descent parser:
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := ('+' | '-') factor | power
//   power   := primary ('^' integer)?
//   primary := integer | 'i' | identifier | '(' expr ')'
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const VariableTable& vars, int kappa)
      : text_(text), vars_(vars), kappa_(kappa) {}

  TruncatedSeries parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    TruncatedSeries s = expr();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return s;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  TruncatedSeries expr() {
    TruncatedSeries s = term();
    for (;;) {
      if (accept('+')) {
        s += term();
      } else if (accept('-')) {
        s -= term();
      } else {
        return s;
      }
    }
  }

  TruncatedSeries term() {
    TruncatedSeries s = factor();
    for (;;) {
      if (accept('*')) {
        s *= factor();
      } else if (accept('/')) {
        skip_space();
        const std::size_t at = pos_;
        TruncatedSeries d = factor();
        if (d.is_zero()) throw ParseError("division by zero", at);
        if (d.degree() > 0) throw ParseError("division by a non-constant expression", at);
        s *= d.constant_term().inverse();
      } else {
        return s;
      }
    }
  }

  TruncatedSeries factor() {
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    return power();
  }

  TruncatedSeries power() {
    TruncatedSeries base = primary();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t at = pos_;
    if (pos_ == text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      throw ParseError("exponent must be a non-negative integer literal", at);
    }
    unsigned long e = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      e = e * 10 + static_cast<unsigned long>(text_[pos_++] - '0');
      if (e > 255) throw ParseError("exponent too large", at);
    }
    TruncatedSeries result = TruncatedSeries::constant(vars_.arity(), kappa_, 1);
    for (unsigned long k = 0; k < e; ++k) result *= base;
    return result;
  }

  TruncatedSeries primary() {
    skip_space();
    const std::size_t at = pos_;
    if (pos_ == text_.size()) throw ParseError("unexpected end of expression", at);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      TruncatedSeries s = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return s;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      mpz_class value(std::string(text_.substr(at, pos_ - at)));
      return TruncatedSeries::constant(vars_.arity(), kappa_, GaussianRational(mpq_class(value)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = text_.substr(at, pos_ - at);
      if (name == "i") return TruncatedSeries::constant(vars_.arity(), kappa_, GaussianRational::i());
      const std::size_t* idx = vars_.find(name);
      if (!idx) throw ParseError("unknown variable '" + std::string(name) + "'", at);
      return TruncatedSeries::variable(vars_.arity(), kappa_, *idx);
    }
    throw ParseError(std::string("unexpected '") + c + "'", at);
  }

  std::string_view text_;
  const VariableTable& vars_;
  int kappa_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline TruncatedSeries parse_expression(std::string_view text, const VariableTable& vars, int kappa) {
  return detail::ExpressionParser(text, vars, kappa).parse();
}

inline std::string to_text(const TruncatedSeries& f, const VariableTable& vars) {
  return to_text(f, vars.names());
}

}  // namespace segre
