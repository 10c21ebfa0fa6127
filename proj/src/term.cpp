#include "ordlab/term.hpp"

#include <cctype>

namespace ordlab {

struct OrderTerm::Node {
  Kind kind;
  uint64_t n = 0;
  std::shared_ptr<const Node> a, b;

  static std::shared_ptr<const Node> make(Kind k, uint64_t n, std::shared_ptr<const Node> a,
                                          std::shared_ptr<const Node> b) {
    auto node = std::make_shared<Node>();
    node->kind = k;
    node->n = n;
    node->a = std::move(a);
    node->b = std::move(b);
    return node;
  }
};

OrderTerm OrderTerm::empty() { return OrderTerm(Node::make(Kind::Empty, 0, nullptr, nullptr)); }

OrderTerm OrderTerm::fin(uint64_t n) {
  if (n == 0) throw DomainError("Fin requires a positive count");
  return OrderTerm(Node::make(Kind::Fin, n, nullptr, nullptr));
}

OrderTerm OrderTerm::omega() { return OrderTerm(Node::make(Kind::Omega, 0, nullptr, nullptr)); }

OrderTerm OrderTerm::rationals() {
  return OrderTerm(Node::make(Kind::Rationals, 0, nullptr, nullptr));
}

OrderTerm OrderTerm::rev(OrderTerm t) {
  return OrderTerm(Node::make(Kind::Rev, 0, t.node_, nullptr));
}

OrderTerm OrderTerm::sum(OrderTerm l, OrderTerm r) {
  return OrderTerm(Node::make(Kind::Sum, 0, l.node_, r.node_));
}

OrderTerm OrderTerm::omegaExp(OrderTerm t) {
  return OrderTerm(Node::make(Kind::OmegaExp, 0, t.node_, nullptr));
}

OrderTerm::Kind OrderTerm::kind() const { return node_->kind; }
uint64_t OrderTerm::finCount() const { return node_->n; }
OrderTerm OrderTerm::left() const { return OrderTerm(node_->a); }
OrderTerm OrderTerm::right() const { return OrderTerm(node_->b); }
OrderTerm OrderTerm::child() const { return OrderTerm(node_->a); }

bool OrderTerm::operator==(const OrderTerm& o) const {
  if (node_ == o.node_) return true;
  if (node_->kind != o.node_->kind) return false;
  switch (node_->kind) {
    case Kind::Empty:
    case Kind::Omega:
    case Kind::Rationals: return true;
    case Kind::Fin: return node_->n == o.node_->n;
    case Kind::Rev:
    case Kind::OmegaExp: return OrderTerm(node_->a) == OrderTerm(o.node_->a);
    case Kind::Sum:
      return OrderTerm(node_->a) == OrderTerm(o.node_->a) &&
             OrderTerm(node_->b) == OrderTerm(o.node_->b);
  }
  return false;
}

std::string OrderTerm::show() const {
  switch (kind()) {
    case Kind::Empty: return "0";
    case Kind::Fin: return std::to_string(finCount());
    case Kind::Omega: return "w";
    case Kind::Rationals: return "q";
    case Kind::Rev: return "rev(" + child().show() + ")";
    case Kind::OmegaExp: return "W(" + child().show() + ")";
    case Kind::Sum: {
      auto wrap = [](const OrderTerm& t) {
        // right operands that are themselves sums need parentheses to
        // round-trip through the left-associative grammar
        return t.kind() == Kind::Sum ? "(" + t.show() + ")" : t.show();
      };
      return left().show() + " + " + wrap(right());
    }
  }
  return "?";
}

size_t OrderTerm::depth() const {
  switch (kind()) {
    case Kind::Empty:
    case Kind::Fin:
    case Kind::Omega:
    case Kind::Rationals: return 1;
    case Kind::Rev:
    case Kind::OmegaExp: return 1 + child().depth();
    case Kind::Sum: {
      size_t l = left().depth(), r = right().depth();
      return 1 + (l > r ? l : r);
    }
  }
  return 1;
}

// --- classification ---------------------------------------------------------

OrderClass classify(const OrderTerm& t) {
  OrderClass c;
  switch (t.kind()) {
    case OrderTerm::Kind::Empty:
    case OrderTerm::Kind::Fin:
    case OrderTerm::Kind::Omega:
      c.isWellOrder = true;
      c.isScattered = true;
      break;
    case OrderTerm::Kind::Rationals:
      c.isWellOrder = false;
      c.isScattered = false;
      break;
    case OrderTerm::Kind::Rev: {
      OrderClass inner = classify(t.child());
      c.isWellOrder = orderSize(t.child()).has_value();
      c.isScattered = inner.isScattered;
      break;
    }
    case OrderTerm::Kind::Sum: {
      OrderClass l = classify(t.left()), r = classify(t.right());
      c.isWellOrder = l.isWellOrder && r.isWellOrder;
      c.isScattered = l.isScattered && r.isScattered;
      break;
    }
    case OrderTerm::Kind::OmegaExp: {
      OrderClass inner = classify(t.child());
      c.isWellOrder = inner.isWellOrder;
      // W(t) over an ill-founded t contains a dense suborder, so it is
      // scattered exactly when t is well ordered.
      c.isScattered = inner.isWellOrder;
      break;
    }
  }
  c.isWeakWellOrder = c.isWellOrder;
  return c;
}

// --- parser ------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& src;
  size_t pos = 0;

  void skipWs() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool atEnd() {
    skipWs();
    return pos >= src.size();
  }

  char peek() {
    skipWs();
    return pos < src.size() ? src[pos] : '\0';
  }

  void expect(char c) {
    skipWs();
    if (pos >= src.size() || src[pos] != c)
      throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  OrderTerm parseAtom() {
    skipWs();
    if (pos >= src.size()) throw ParseError("expected a term", pos);
    char c = src[pos];
    if (c == '(') {
      ++pos;
      OrderTerm t = parseSum();
      expect(')');
      return t;
    }
    if (c == 'w') {
      ++pos;
      return OrderTerm::omega();
    }
    if (c == 'q') {
      ++pos;
      return OrderTerm::rationals();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      uint64_t n = 0;
      size_t start = pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        n = n * 10 + static_cast<uint64_t>(src[pos] - '0');
        if (n > 1000000) throw ParseError("numeral too large", start);
        ++pos;
      }
      return n == 0 ? OrderTerm::empty() : OrderTerm::fin(n);
    }
    if (c == 'r' && src.compare(pos, 4, "rev(") == 0) {
      pos += 4;
      OrderTerm t = parseSum();
      expect(')');
      return OrderTerm::rev(t);
    }
    if (c == 'W') {
      ++pos;
      expect('(');
      OrderTerm t = parseSum();
      expect(')');
      return OrderTerm::omegaExp(t);
    }
    throw ParseError("expected a term", pos);
  }

  OrderTerm parseSum() {
    OrderTerm t = parseAtom();
    while (peek() == '+') {
      ++pos;
      t = OrderTerm::sum(t, parseAtom());
    }
    return t;
  }
};

}  // namespace

OrderTerm parseTerm(const std::string& src) {
  Parser p{src};
  OrderTerm t = p.parseSum();
  if (!p.atEnd()) throw ParseError("trailing input", p.pos);
  return t;
}

// --- structural facts --------------------------------------------------------

bool orderIsEmpty(const OrderTerm& t) {
  switch (t.kind()) {
    case OrderTerm::Kind::Empty: return true;
    case OrderTerm::Kind::Fin:
    case OrderTerm::Kind::Omega:
    case OrderTerm::Kind::Rationals: return false;
    case OrderTerm::Kind::Rev: return orderIsEmpty(t.child());
    case OrderTerm::Kind::Sum: return orderIsEmpty(t.left()) && orderIsEmpty(t.right());
    case OrderTerm::Kind::OmegaExp: return false;  // always has the empty tuple
  }
  return false;
}

std::optional<uint64_t> orderSize(const OrderTerm& t) {
  switch (t.kind()) {
    case OrderTerm::Kind::Empty: return 0;
    case OrderTerm::Kind::Fin: return t.finCount();
    case OrderTerm::Kind::Omega:
    case OrderTerm::Kind::Rationals: return std::nullopt;
    case OrderTerm::Kind::Rev: return orderSize(t.child());
    case OrderTerm::Kind::Sum: {
      auto l = orderSize(t.left()), r = orderSize(t.right());
      if (l && r) return *l + *r;
      return std::nullopt;
    }
    case OrderTerm::Kind::OmegaExp:
      return orderIsEmpty(t.child()) ? std::optional<uint64_t>(1) : std::nullopt;
  }
  return std::nullopt;
}

bool orderHasMinimum(const OrderTerm& t) {
  switch (t.kind()) {
    case OrderTerm::Kind::Empty: return false;
    case OrderTerm::Kind::Fin:
    case OrderTerm::Kind::Omega: return true;
    case OrderTerm::Kind::Rationals: return false;
    case OrderTerm::Kind::Rev: return orderHasMaximum(t.child());
    case OrderTerm::Kind::Sum:
      return orderIsEmpty(t.left()) ? orderHasMinimum(t.right()) : orderHasMinimum(t.left());
    case OrderTerm::Kind::OmegaExp: return true;  // the empty tuple
  }
  return false;
}

bool orderHasMaximum(const OrderTerm& t) {
  switch (t.kind()) {
    case OrderTerm::Kind::Empty: return false;
    case OrderTerm::Kind::Fin: return true;
    case OrderTerm::Kind::Omega:
    case OrderTerm::Kind::Rationals: return false;
    case OrderTerm::Kind::Rev: return orderHasMinimum(t.child());
    case OrderTerm::Kind::Sum:
      return orderIsEmpty(t.right()) ? orderHasMaximum(t.left()) : orderHasMaximum(t.right());
    case OrderTerm::Kind::OmegaExp: return orderIsEmpty(t.child());
  }
  return false;
}

bool containsRationalsSubterm(const OrderTerm& t) {
  switch (t.kind()) {
    case OrderTerm::Kind::Rationals: return true;
    case OrderTerm::Kind::Rev:
    case OrderTerm::Kind::OmegaExp: return containsRationalsSubterm(t.child());
    case OrderTerm::Kind::Sum:
      return containsRationalsSubterm(t.left()) || containsRationalsSubterm(t.right());
    default: return false;
  }
}

size_t omegaExpNodeCount(const OrderTerm& t) {
  switch (t.kind()) {
    case OrderTerm::Kind::OmegaExp: return 1 + omegaExpNodeCount(t.child());
    case OrderTerm::Kind::Rev: return omegaExpNodeCount(t.child());
    case OrderTerm::Kind::Sum:
      return omegaExpNodeCount(t.left()) + omegaExpNodeCount(t.right());
    default: return 0;
  }
}

bool hasNestedOmegaExp(const OrderTerm& t) {
  switch (t.kind()) {
    case OrderTerm::Kind::OmegaExp: return omegaExpNodeCount(t.child()) > 0;
    case OrderTerm::Kind::Rev: return hasNestedOmegaExp(t.child());
    case OrderTerm::Kind::Sum:
      return hasNestedOmegaExp(t.left()) || hasNestedOmegaExp(t.right());
    default: return false;
  }
}

Ord orderTypeOf(const OrderTerm& t) {
  switch (t.kind()) {
    case OrderTerm::Kind::Empty: return Ord();
    case OrderTerm::Kind::Fin: return Ord::finite(t.finCount());
    case OrderTerm::Kind::Omega: return Ord::omega();
    case OrderTerm::Kind::Rationals:
      throw DomainError("order type requested for a non-well-order term");
    case OrderTerm::Kind::Rev: {
      auto sz = orderSize(t.child());
      if (!sz) throw DomainError("order type requested for a non-well-order term");
      return Ord::finite(*sz);
    }
    case OrderTerm::Kind::Sum: return orderTypeOf(t.left()) + orderTypeOf(t.right());
    case OrderTerm::Kind::OmegaExp: return Ord::omegaPow(orderTypeOf(t.child()));
  }
  return Ord();
}

}  // namespace ordlab
