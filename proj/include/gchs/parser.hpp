#pragma once

// Recursive-descent parser for scalar-field expressions.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ('-' | '+') factor | base ('^' '-'? integer)?
//   base   := number | 'i' | ident | ident '(' expr ')' | '(' expr ')'
//
// Identifiers: q<j>, p<j>, z<j> with 1 <= j <= n, the imaginary unit i, and
// t when time is enabled. Functions: sin cos exp log conj. z<j> desugars to
// q<j> + i*p<j>, and conj(z<j>) to q<j> - i*p<j>.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "gchs/errors.hpp"
#include "gchs/field.hpp"

namespace gchs {

struct ParseOptions {
  bool allow_time = false;
};

namespace detail {

class FieldParser {
 public:
  FieldParser(std::string_view text, std::size_t n, ParseOptions options)
      : text_(text), n_(n), options_(options) {}

  Field parse() {
    skip_space();
    if (at_end()) fail(ParseError::Kind::syntax, "empty expression");
    Field result = expr();
    skip_space();
    if (!at_end()) fail(ParseError::Kind::syntax, std::string("unexpected '") + text_[pos_] + "'");
    return result;
  }

 private:
  Field expr() {
    Field lhs = term();
    for (;;) {
      skip_space();
      if (accept('+')) {
        lhs = lhs + term();
      } else if (accept('-')) {
        lhs = lhs - term();
      } else {
        return lhs;
      }
    }
  }

  Field term() {
    Field lhs = factor();
    for (;;) {
      skip_space();
      if (accept('*')) {
        lhs = lhs * factor();
      } else if (accept('/')) {
        lhs = lhs / factor();
      } else {
        return lhs;
      }
    }
  }

  Field factor() {
    skip_space();
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    Field b = base();
    skip_space();
    if (accept('^')) {
      skip_space();
      const bool negative = accept('-');
      skip_space();
      const std::size_t start = pos_;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail(ParseError::Kind::syntax, "integer exponent expected", start);
      if (!at_end() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
        fail(ParseError::Kind::syntax, "exponent must be an integer", start);
      int exponent = 0;
      auto res = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
      if (res.ec != std::errc{}) fail(ParseError::Kind::syntax, "exponent out of range", start);
      b = pow(b, negative ? -exponent : exponent);
    }
    return b;
  }

  Field base() {
    skip_space();
    if (at_end()) fail(ParseError::Kind::syntax, "unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Field inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(ParseError::Kind::syntax, std::string("unexpected '") + c + "'");
  }

  Field number() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (!at_end() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc{} || res.ptr != text_.data() + pos_)
      fail(ParseError::Kind::syntax, "malformed number", start);
    return Field(value);
  }

  Field identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_space();
    if (!at_end() && text_[pos_] == '(') return call(name, start);

    if (name == "i") return Field::imaginary();
    if (name == "t") {
      if (!options_.allow_time) fail(ParseError::Kind::unknown_identifier, "time 't' is not allowed here", start);
      return Field::time(n_);
    }
    if (const auto coord = coordinate(name, start)) return *coord;
    fail(ParseError::Kind::unknown_identifier, "unknown identifier '" + std::string(name) + "'", start);
  }

  Field call(std::string_view name, std::size_t start) {
    expect('(');
    const std::size_t arg_start = pos_;
    Field arg = expr();
    expect(')');
    if (name == "sin") return sin(arg);
    if (name == "cos") return cos(arg);
    if (name == "exp") return exp(arg);
    if (name == "log") return log(arg);
    if (name == "conj") {
      // conj(zj) desugars directly; anything else keeps an explicit conjugation node.
      std::string_view inner = text_.substr(arg_start, pos_ - 1 - arg_start);
      while (!inner.empty() && std::isspace(static_cast<unsigned char>(inner.front()))) inner.remove_prefix(1);
      while (!inner.empty() && std::isspace(static_cast<unsigned char>(inner.back()))) inner.remove_suffix(1);
      if (inner.size() > 1 && inner.front() == 'z' && is_index(inner.substr(1))) {
        const std::size_t j = std::stoul(std::string(inner.substr(1)));
        return Field::zbar(n_, j - 1);
      }
      return conj(arg);
    }
    fail(ParseError::Kind::unknown_identifier, "unknown function '" + std::string(name) + "'", start);
  }

  std::optional<Field> coordinate(std::string_view name, std::size_t start) {
    if (name.size() < 2) return std::nullopt;
    const char kind = name.front();
    if (kind != 'q' && kind != 'p' && kind != 'z') return std::nullopt;
    const std::string_view digits = name.substr(1);
    if (!is_index(digits)) return std::nullopt;
    std::size_t j = 0;
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(), j);
    if (res.ec != std::errc{} || j < 1 || j > n_)
      fail(ParseError::Kind::index_out_of_range,
           "index of '" + std::string(name) + "' outside 1.." + std::to_string(n_), start);
    if (kind == 'q') return Field::q(n_, j - 1);
    if (kind == 'p') return Field::p(n_, j - 1);
    return Field::z(n_, j - 1);
  }

  static bool is_index(std::string_view digits) {
    if (digits.empty()) return false;
    for (char d : digits)
      if (!std::isdigit(static_cast<unsigned char>(d))) return false;
    return true;
  }

  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (!accept(c)) {
      if (at_end()) fail(ParseError::Kind::syntax, std::string("expected '") + c + "' before end of expression");
      fail(ParseError::Kind::syntax, std::string("expected '") + c + "'");
    }
  }

  [[noreturn]] void fail(ParseError::Kind kind, const std::string& message) const { fail(kind, message, pos_); }

  [[noreturn]] void fail(ParseError::Kind kind, const std::string& message, std::size_t at) const {
    throw ParseError(kind, at + 1, message);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t n_;
  ParseOptions options_;
};

}  // namespace detail

/// Parses text into a field of dimension n. Throws ParseError.
inline Field parse_field(std::string_view text, std::size_t n, ParseOptions options = {}) {
  if (n == 0) throw std::invalid_argument("dimension must be positive");
  return detail::FieldParser(text, n, options).parse().with_dimension(n);
}

}  // namespace gchs
