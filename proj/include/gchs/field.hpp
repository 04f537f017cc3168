#pragma once

// Scalar fields over phase space: immutable expression trees that can be
// evaluated over any scalar type built from Complex and Dual<>.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gchs/dual.hpp"
#include "gchs/errors.hpp"
#include "gchs/phasespace.hpp"

namespace gchs {

namespace detail {

enum class NodeKind {
  constant,
  imaginary,
  q,
  p,
  time,
  negate,
  add,
  subtract,
  multiply,
  divide,
  power,
  sin,
  cos,
  exp,
  log,
  conj,
};

struct Node {
  NodeKind kind = NodeKind::constant;
  Complex value{};
  int index = 0;  // coordinate index (0-based) or integer exponent
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

inline NodePtr make_node(NodeKind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr, int index = 0,
                         Complex value = {}) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  node->index = index;
  node->value = value;
  return node;
}

// Shortest decimal that parses back to the same double.
inline std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

template <class S>
S integer_power(S base, int exponent) {
  S result = lift<S>(1.0);
  unsigned e = static_cast<unsigned>(exponent < 0 ? -exponent : exponent);
  while (e != 0) {
    if (e & 1U) result = result * base;
    e >>= 1U;
    if (e != 0) base = base * base;
  }
  return result;
}

template <class S>
S eval_node(const Node& node, std::span<const S> phase, const S& time) {
  using std::conj;
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  const std::size_t n = phase.size() / 2;
  switch (node.kind) {
    case NodeKind::constant:
    case NodeKind::imaginary:
      return lift<S>(node.value);
    case NodeKind::q:
      return phase[static_cast<std::size_t>(node.index)];
    case NodeKind::p:
      return phase[n + static_cast<std::size_t>(node.index)];
    case NodeKind::time:
      return time;
    case NodeKind::negate:
      return -eval_node(*node.lhs, phase, time);
    case NodeKind::add:
      return eval_node(*node.lhs, phase, time) + eval_node(*node.rhs, phase, time);
    case NodeKind::subtract:
      return eval_node(*node.lhs, phase, time) - eval_node(*node.rhs, phase, time);
    case NodeKind::multiply:
      return eval_node(*node.lhs, phase, time) * eval_node(*node.rhs, phase, time);
    case NodeKind::divide: {
      const S den = eval_node(*node.rhs, phase, time);
      if (primal(den) == Complex{}) throw DomainError("division by zero");
      return eval_node(*node.lhs, phase, time) / den;
    }
    case NodeKind::power: {
      const S base = eval_node(*node.lhs, phase, time);
      if (node.index < 0) {
        if (primal(base) == Complex{}) throw DomainError("negative power of zero");
        return lift<S>(1.0) / integer_power(base, node.index);
      }
      return integer_power(base, node.index);
    }
    case NodeKind::sin:
      return sin(eval_node(*node.lhs, phase, time));
    case NodeKind::cos:
      return cos(eval_node(*node.lhs, phase, time));
    case NodeKind::exp:
      return exp(eval_node(*node.lhs, phase, time));
    case NodeKind::log: {
      const S arg = eval_node(*node.lhs, phase, time);
      if (primal(arg) == Complex{}) throw DomainError("log of zero");
      return log(arg);
    }
    case NodeKind::conj:
      return conj(eval_node(*node.lhs, phase, time));
  }
  throw std::logic_error("unhandled node kind");
}

// Binding strength used by the printer; higher binds tighter.
inline int precedence(NodeKind kind) {
  switch (kind) {
    case NodeKind::add:
    case NodeKind::subtract:
      return 1;
    case NodeKind::multiply:
    case NodeKind::divide:
      return 2;
    case NodeKind::negate:
      return 3;
    case NodeKind::power:
      return 4;
    default:
      return 5;
  }
}

inline std::string print_node(const Node& node) {
  auto wrap = [](const Node& child, int min_prec) {
    std::string text = print_node(child);
    return precedence(child.kind) < min_prec ? "(" + text + ")" : text;
  };
  switch (node.kind) {
    case NodeKind::constant: {
      const double re = node.value.real();
      const double im = node.value.imag();
      if (im == 0.0) {
        std::string text = format_real(re);
        return re < 0.0 || std::signbit(re) ? "(" + text + ")" : text;
      }
      if (re == 0.0) return "(" + format_real(im) + "*i)";
      return "(" + format_real(re) + " + " + format_real(im) + "*i)";
    }
    case NodeKind::imaginary:
      return "i";
    case NodeKind::q:
      return "q" + std::to_string(node.index + 1);
    case NodeKind::p:
      return "p" + std::to_string(node.index + 1);
    case NodeKind::time:
      return "t";
    case NodeKind::negate:
      return "-" + wrap(*node.lhs, 4);
    case NodeKind::add:
      return wrap(*node.lhs, 1) + " + " + wrap(*node.rhs, 2);
    case NodeKind::subtract:
      return wrap(*node.lhs, 1) + " - " + wrap(*node.rhs, 2);
    case NodeKind::multiply:
      return wrap(*node.lhs, 2) + "*" + wrap(*node.rhs, 3);
    case NodeKind::divide:
      return wrap(*node.lhs, 2) + "/" + wrap(*node.rhs, 3);
    case NodeKind::power:
      return wrap(*node.lhs, 5) + "^" + std::to_string(node.index);
    case NodeKind::sin:
      return "sin(" + print_node(*node.lhs) + ")";
    case NodeKind::cos:
      return "cos(" + print_node(*node.lhs) + ")";
    case NodeKind::exp:
      return "exp(" + print_node(*node.lhs) + ")";
    case NodeKind::log:
      return "log(" + print_node(*node.lhs) + ")";
    case NodeKind::conj:
      return "conj(" + print_node(*node.lhs) + ")";
  }
  throw std::logic_error("unhandled node kind");
}

inline bool uses_time(const Node& node) {
  if (node.kind == NodeKind::time) return true;
  return (node.lhs && uses_time(*node.lhs)) || (node.rhs && uses_time(*node.rhs));
}

inline bool is_constant_tree(const Node& node) {
  switch (node.kind) {
    case NodeKind::q:
    case NodeKind::p:
    case NodeKind::time:
      return false;
    default:
      return (!node.lhs || is_constant_tree(*node.lhs)) && (!node.rhs || is_constant_tree(*node.rhs));
  }
}

}  // namespace detail

/// A complex-valued scalar field over the 2n real phase coordinates
/// (optionally also over a time variable t). Cheap to copy; subtrees are shared.
///
/// dimension() is the phase-space dimension n the field was declared for, or 0
/// for a field built only from constants, which is valid in every dimension.
class Field {
 public:
  Field() : Field(Complex{}) {}
  Field(Complex c) : Field(detail::make_node(detail::NodeKind::constant, nullptr, nullptr, 0, c), 0) {}
  Field(double c) : Field(Complex(c, 0.0)) {}

  static Field constant(Complex c) { return Field(c); }

  static Field imaginary() {
    return Field(detail::make_node(detail::NodeKind::imaginary, nullptr, nullptr, 0, imaginary_unit), 0);
  }

  /// Coordinate q_{j+1} of an n-dimensional phase space (j is 0-based).
  static Field q(std::size_t n, std::size_t j) { return coordinate(detail::NodeKind::q, n, j); }
  static Field p(std::size_t n, std::size_t j) { return coordinate(detail::NodeKind::p, n, j); }
  static Field z(std::size_t n, std::size_t j) { return q(n, j) + imaginary() * p(n, j); }
  static Field zbar(std::size_t n, std::size_t j) { return q(n, j) - imaginary() * p(n, j); }

  static Field time(std::size_t n) {
    if (n == 0) throw std::invalid_argument("dimension must be positive");
    return Field(detail::make_node(detail::NodeKind::time), n);
  }

  std::size_t dimension() const noexcept { return dimension_; }

  /// Same expression declared for dimension n (only widens constant-only fields).
  Field with_dimension(std::size_t n) const { return Field(root_, merge_dimension(n, dimension_)); }
  bool depends_on_time() const { return detail::uses_time(*root_); }
  bool is_constant() const { return detail::is_constant_tree(*root_); }

  /// Evaluates over the flat coordinates (q1..qn, p1..pn) in scalar type S.
  template <class S>
  S evaluate(std::span<const S> phase, const S& time) const {
    check_arity(phase.size());
    return detail::eval_node(*root_, phase, time);
  }

  template <class S>
  S evaluate(std::span<const S> phase) const {
    return evaluate(phase, lift<S>(0.0));
  }

  /// Value at a point. Throws DomainError for ÷0, log 0 or a non-finite result.
  Complex operator()(const PhasePoint& pt, double t = 0.0) const {
    std::vector<Complex> x;
    x.reserve(2 * pt.dimension());
    for (double v : pt.q()) x.emplace_back(v);
    for (double v : pt.p()) x.emplace_back(v);
    const Complex value = evaluate<Complex>(x, Complex(t));
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      throw DomainError("field evaluated to a non-finite value");
    return value;
  }

  /// Infix text accepted back by parse_field with the same dimension.
  std::string to_string() const { return detail::print_node(*root_); }

  friend Field operator+(const Field& a, const Field& b) { return binary(detail::NodeKind::add, a, b); }
  friend Field operator-(const Field& a, const Field& b) { return binary(detail::NodeKind::subtract, a, b); }
  friend Field operator*(const Field& a, const Field& b) { return binary(detail::NodeKind::multiply, a, b); }
  friend Field operator/(const Field& a, const Field& b) { return binary(detail::NodeKind::divide, a, b); }
  friend Field operator-(const Field& a) { return unary(detail::NodeKind::negate, a); }

  friend Field pow(const Field& base, int exponent) {
    return Field(detail::make_node(detail::NodeKind::power, base.root_, nullptr, exponent), base.dimension_);
  }
  friend Field sin(const Field& a) { return unary(detail::NodeKind::sin, a); }
  friend Field cos(const Field& a) { return unary(detail::NodeKind::cos, a); }
  friend Field exp(const Field& a) { return unary(detail::NodeKind::exp, a); }
  friend Field log(const Field& a) { return unary(detail::NodeKind::log, a); }
  friend Field conj(const Field& a) { return unary(detail::NodeKind::conj, a); }

 private:
  Field(detail::NodePtr root, std::size_t dimension) : root_(std::move(root)), dimension_(dimension) {}

  static Field coordinate(detail::NodeKind kind, std::size_t n, std::size_t j) {
    if (j >= n) throw std::invalid_argument("coordinate index out of range");
    return Field(detail::make_node(kind, nullptr, nullptr, static_cast<int>(j)), n);
  }

  static std::size_t merge_dimension(std::size_t a, std::size_t b) {
    if (a == 0) return b;
    if (b == 0 || a == b) return a;
    throw std::invalid_argument("cannot combine fields of dimension " + std::to_string(a) + " and " +
                                std::to_string(b));
  }

  static Field binary(detail::NodeKind kind, const Field& a, const Field& b) {
    return Field(detail::make_node(kind, a.root_, b.root_), merge_dimension(a.dimension_, b.dimension_));
  }

  static Field unary(detail::NodeKind kind, const Field& a) {
    return Field(detail::make_node(kind, a.root_), a.dimension_);
  }

  void check_arity(std::size_t flat_size) const {
    if (flat_size == 0 || flat_size % 2 != 0) throw std::invalid_argument("flat coordinates must have even length");
    if (dimension_ != 0 && dimension_ != flat_size / 2)
      throw std::invalid_argument("field of dimension " + std::to_string(dimension_) +
                                  " evaluated in dimension " + std::to_string(flat_size / 2));
  }

  detail::NodePtr root_;
  std::size_t dimension_ = 0;
};

}  // namespace gchs
