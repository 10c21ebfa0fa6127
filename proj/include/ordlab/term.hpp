// The closed term algebra of countable linear orders and its classifier.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "ordlab/errors.hpp"
#include "ordlab/ordinal.hpp"

namespace ordlab {

// Terms: 0 (empty), n (finite chain, n >= 1), w (omega), q (rationals),
// rev(t), t + t, W(t) (the order of finite non-increasing sequences over t
// under lexicographic comparison). Immutable shared trees.
class OrderTerm {
 public:
  enum class Kind { Empty, Fin, Omega, Rationals, Rev, Sum, OmegaExp };

  static OrderTerm empty();
  static OrderTerm fin(uint64_t n);  // throws DomainError for n == 0
  static OrderTerm omega();
  static OrderTerm rationals();
  static OrderTerm rev(OrderTerm t);
  static OrderTerm sum(OrderTerm left, OrderTerm right);
  static OrderTerm omegaExp(OrderTerm t);

  Kind kind() const;
  uint64_t finCount() const;  // Fin only
  OrderTerm left() const;     // Sum
  OrderTerm right() const;    // Sum
  OrderTerm child() const;    // Rev, OmegaExp

  bool operator==(const OrderTerm& o) const;
  bool operator!=(const OrderTerm& o) const { return !(*this == o); }

  // Canonical printable form, re-parsable by parseTerm.
  std::string show() const;

  size_t depth() const;

 private:
  struct Node;
  explicit OrderTerm(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct OrderClass {
  bool isWellOrder = false;
  bool isWeakWellOrder = false;
  bool isScattered = false;
};

// Structural classification. The weak-well-order column equals the well-order
// column: every ill-founded term carries an explicit self-embedding into a
// proper initial segment (see embedding.hpp), and every well order is a weak
// well order since such an embedding would yield an infinite descending orbit.
OrderClass classify(const OrderTerm& t);

// Grammar: 0 | 1 | <n> | w | q | rev(<t>) | W(<t>) | <t> + <t>,
// '+' left-associative, whitespace insignificant. Throws ParseError.
OrderTerm parseTerm(const std::string& src);

// Structural facts used by the exact oracles.
bool orderIsEmpty(const OrderTerm& t);                  // no points at all
std::optional<uint64_t> orderSize(const OrderTerm& t);  // nullopt = infinite
bool orderHasMinimum(const OrderTerm& t);
bool orderHasMaximum(const OrderTerm& t);
bool containsRationalsSubterm(const OrderTerm& t);
size_t omegaExpNodeCount(const OrderTerm& t);
bool hasNestedOmegaExp(const OrderTerm& t);

// Order type as an ordinal below epsilon_0; requires classify(t).isWellOrder.
Ord orderTypeOf(const OrderTerm& t);

}  // namespace ordlab
