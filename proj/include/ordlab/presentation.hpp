// Enumerated presentations of countable linear orders with exact
// interval-finiteness oracles.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ordlab/code.hpp"
#include "ordlab/ordinal.hpp"
#include "ordlab/term.hpp"

namespace ordlab {

// A countable linear order given by an injective enumeration of point codes,
// a total decidable comparison, and exact finiteness oracles:
//   intervalFinite(a,b) - finitely many points strictly between a and b
//   belowFinite(b)      - the initial segment strictly below b is finite
//   aboveFinite(a)      - the final segment strictly above a is finite
// The oracles answer about the full order, never about an enumerated prefix.
class Presentation {
 public:
  using Ptr = std::shared_ptr<const Presentation>;

  virtual ~Presentation() = default;

  virtual bool contains(const Code& c) const = 0;
  virtual Ordering compare(const Code& a, const Code& b) const = 0;

  // Injective; every point appears at exactly one index. nullopt past the end
  // of a finite order.
  virtual std::optional<Code> enumerate(uint64_t index) const = 0;
  virtual std::optional<uint64_t> size() const = 0;  // nullopt = infinite

  virtual bool intervalFinite(const Code& a, const Code& b) const = 0;
  virtual bool belowFinite(const Code& b) const = 0;
  virtual bool aboveFinite(const Code& a) const = 0;

  // Exact ordinal positions; available when the presentation is backed by a
  // well-ordered term. pointAtPosition inverts positionOf within the order.
  virtual std::optional<Ord> orderType() const { return std::nullopt; }
  virtual std::optional<Ord> positionOf(const Code&) const { return std::nullopt; }
  virtual std::optional<Code> pointAtPosition(const Ord&) const { return std::nullopt; }

  virtual std::string describe() const = 0;
};

// Canonical semantics of the term algebra.
Presentation::Ptr denote(const OrderTerm& t);

// Validating comparison; throws DomainError on codes outside the presentation.
Ordering comparePoints(const Presentation& p, const Code& a, const Code& b);

// The first n enumerated codes with their induced linear order.
struct FiniteOrder {
  std::vector<Code> codes;           // in enumeration order
  std::vector<size_t> sortedByOrder; // indices into codes, ascending
};
FiniteOrder prefix(const Presentation& p, uint64_t n);

// Enumeration index of a code, scanning at most `cap` indices.
std::optional<uint64_t> enumerationIndexOf(const Presentation& p, const Code& c, uint64_t cap);

// Matches the first `count` enumerated points of a against the equal-position
// points of b (the unique initial-segment isomorphism between well orders) and
// verifies the matching is order-preserving and injective. Both presentations
// must expose positions. Returns false with no side effects if any point has
// no partner or order is not preserved.
bool initialSegmentIso(const Presentation& a, const Presentation& b, uint64_t count);

}  // namespace ordlab
