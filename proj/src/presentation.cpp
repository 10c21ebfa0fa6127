#include "ordlab/presentation.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "ordlab/errors.hpp"
#include "ordlab/rational_coding.hpp"

namespace ordlab {

// --- rational coding ---------------------------------------------------------

std::string rationalStringOfIndex(uint64_t index) {
  // shortlex: index+1 written in binary, leading 1 removed
  uint64_t v = index + 1;
  std::string s;
  while (v > 1) {
    s += static_cast<char>('0' + (v & 1));
    v >>= 1;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

uint64_t rationalIndexOfString(const std::string& bits) {
  uint64_t v = 1;
  for (char c : bits) v = (v << 1) | static_cast<uint64_t>(c - '0');
  return v - 1;
}

Ordering rationalCompare(uint64_t a, uint64_t b) {
  if (a == b) return Ordering::Equal;
  std::string sa = rationalStringOfIndex(a), sb = rationalStringOfIndex(b);
  // value (2*val+1) / 2^(len+1); cross-multiply exactly
  unsigned __int128 va = 1, vb = 1;
  for (char c : sa) va = (va << 1) | static_cast<unsigned>(c - '0');
  for (char c : sb) vb = (vb << 1) | static_cast<unsigned>(c - '0');
  va = 2 * (va - (static_cast<unsigned __int128>(1) << sa.size())) + 1;
  vb = 2 * (vb - (static_cast<unsigned __int128>(1) << sb.size())) + 1;
  unsigned __int128 lhs = va << sb.size();
  unsigned __int128 rhs = vb << sa.size();
  return lhs < rhs ? Ordering::Less : (lhs == rhs ? Ordering::Equal : Ordering::Greater);
}

// --- term structure helpers --------------------------------------------------

namespace {

using Kind = OrderTerm::Kind;

std::optional<Code> minimumCodeOf(const OrderTerm& t);
std::optional<Code> maximumCodeOf(const OrderTerm& t);

std::optional<Code> minimumCodeOf(const OrderTerm& t) {
  switch (t.kind()) {
    case Kind::Empty: return std::nullopt;
    case Kind::Fin:
    case Kind::Omega: return Code(0);
    case Kind::Rationals: return std::nullopt;
    case Kind::Rev: return maximumCodeOf(t.child());
    case Kind::Sum: {
      if (!orderIsEmpty(t.left())) {
        auto m = minimumCodeOf(t.left());
        if (!m) return std::nullopt;
        return Code::pair(0, *m);
      }
      auto m = minimumCodeOf(t.right());
      if (!m) return std::nullopt;
      return Code::pair(1, *m);
    }
    case Kind::OmegaExp: return Code::tuple({});
  }
  return std::nullopt;
}

std::optional<Code> maximumCodeOf(const OrderTerm& t) {
  switch (t.kind()) {
    case Kind::Empty: return std::nullopt;
    case Kind::Fin: return Code(t.finCount() - 1);
    case Kind::Omega:
    case Kind::Rationals: return std::nullopt;
    case Kind::Rev: return minimumCodeOf(t.child());
    case Kind::Sum: {
      if (!orderIsEmpty(t.right())) {
        auto m = maximumCodeOf(t.right());
        if (!m) return std::nullopt;
        return Code::pair(1, *m);
      }
      auto m = maximumCodeOf(t.left());
      if (!m) return std::nullopt;
      return Code::pair(0, *m);
    }
    case Kind::OmegaExp:
      return orderIsEmpty(t.child()) ? std::optional<Code>(Code::tuple({})) : std::nullopt;
  }
  return std::nullopt;
}

// --- the canonical term presentation ----------------------------------------

class TermPresentation : public Presentation,
                         public std::enable_shared_from_this<TermPresentation> {
 public:
  explicit TermPresentation(OrderTerm t) : term_(std::move(t)) {
    switch (term_.kind()) {
      case Kind::Rev:
      case Kind::OmegaExp:
        childA_ = std::static_pointer_cast<const TermPresentation>(denote(term_.child()));
        break;
      case Kind::Sum:
        childA_ = std::static_pointer_cast<const TermPresentation>(denote(term_.left()));
        childB_ = std::static_pointer_cast<const TermPresentation>(denote(term_.right()));
        break;
      default: break;
    }
    wellOrder_ = classify(term_).isWellOrder;
    size_ = orderSize(term_);
  }

  const OrderTerm& term() const { return term_; }

  bool contains(const Code& c) const override {
    switch (term_.kind()) {
      case Kind::Empty: return false;
      case Kind::Fin: return c.isLeaf() && c.leaf() < term_.finCount();
      case Kind::Omega:
      case Kind::Rationals: return c.isLeaf();
      case Kind::Rev: return childA_->contains(c);
      case Kind::Sum: {
        if (c.isLeaf() || c.parts().size() != 2 || !c.parts()[0].isLeaf()) return false;
        uint64_t tag = c.parts()[0].leaf();
        if (tag == 0) return childA_->contains(c.parts()[1]);
        if (tag == 1) return childB_->contains(c.parts()[1]);
        return false;
      }
      case Kind::OmegaExp: {
        if (c.isLeaf()) return false;
        const auto& ps = c.parts();
        for (const auto& p : ps)
          if (!childA_->contains(p)) return false;
        for (size_t i = 0; i + 1 < ps.size(); ++i)
          if (childA_->compare(ps[i], ps[i + 1]) == Ordering::Less) return false;
        return true;
      }
    }
    return false;
  }

  Ordering compare(const Code& a, const Code& b) const override {
    switch (term_.kind()) {
      case Kind::Empty: throw DomainError("compare on the empty order");
      case Kind::Fin:
      case Kind::Omega:
        return a.leaf() < b.leaf() ? Ordering::Less
                                   : (a.leaf() == b.leaf() ? Ordering::Equal : Ordering::Greater);
      case Kind::Rationals: return rationalCompare(a.leaf(), b.leaf());
      case Kind::Rev: return flip(childA_->compare(a, b));
      case Kind::Sum: {
        uint64_t ta = a.parts()[0].leaf(), tb = b.parts()[0].leaf();
        if (ta != tb) return ta < tb ? Ordering::Less : Ordering::Greater;
        return (ta == 0 ? childA_ : childB_)->compare(a.parts()[1], b.parts()[1]);
      }
      case Kind::OmegaExp: {
        const auto& pa = a.parts();
        const auto& pb = b.parts();
        size_t n = std::min(pa.size(), pb.size());
        for (size_t i = 0; i < n; ++i) {
          Ordering c = childA_->compare(pa[i], pb[i]);
          if (c != Ordering::Equal) return c;
        }
        if (pa.size() != pb.size())
          return pa.size() < pb.size() ? Ordering::Less : Ordering::Greater;
        return Ordering::Equal;
      }
    }
    return Ordering::Equal;
  }

  std::optional<uint64_t> size() const override { return size_; }

  std::optional<Code> enumerate(uint64_t index) const override {
    if (size_ && index >= *size_) return std::nullopt;
    switch (term_.kind()) {
      case Kind::Empty: return std::nullopt;
      case Kind::Fin:
      case Kind::Omega:
      case Kind::Rationals: return Code(index);
      case Kind::Rev: return childA_->enumerate(index);
      case Kind::Sum: {
        constexpr uint64_t inf = UINT64_MAX;
        uint64_t la = childA_->size().value_or(inf);
        uint64_t ra = childB_->size().value_or(inf);
        uint64_t both = std::min(la, ra);
        if (both < UINT64_MAX / 2 && index >= 2 * both) {
          if (la <= ra) return wrapSum(1, childB_->enumerate(index - la));
          return wrapSum(0, childA_->enumerate(index - ra));
        }
        if (index % 2 == 0) return wrapSum(0, childA_->enumerate(index / 2));
        return wrapSum(1, childB_->enumerate(index / 2));
      }
      case Kind::OmegaExp: return enumerateExp(index);
    }
    return std::nullopt;
  }

  bool intervalFinite(const Code& a, const Code& b) const override {
    Ordering o = compare(a, b);
    if (o == Ordering::Equal) return true;
    const Code& lo = (o == Ordering::Less) ? a : b;
    const Code& hi = (o == Ordering::Less) ? b : a;
    return intervalFiniteOrdered(lo, hi);
  }

  bool belowFinite(const Code& b) const override {
    switch (term_.kind()) {
      case Kind::Empty:
      case Kind::Fin:
      case Kind::Omega: return true;
      case Kind::Rationals: return false;
      case Kind::Rev: return childA_->aboveFinite(b);
      case Kind::Sum: {
        uint64_t tag = b.parts()[0].leaf();
        if (tag == 0) return childA_->belowFinite(b.parts()[1]);
        return childA_->size().has_value() && childB_->belowFinite(b.parts()[1]);
      }
      case Kind::OmegaExp: {
        const auto& ps = b.parts();
        if (ps.empty()) return true;
        auto m = minimumCodeOf(term_.child());
        if (!m) return false;
        for (const auto& p : ps)
          if (p != *m) return false;
        return true;
      }
    }
    return false;
  }

  bool aboveFinite(const Code& a) const override {
    switch (term_.kind()) {
      case Kind::Empty:
      case Kind::Fin: return true;
      case Kind::Omega:
      case Kind::Rationals: return false;
      case Kind::Rev: return childA_->belowFinite(a);
      case Kind::Sum: {
        uint64_t tag = a.parts()[0].leaf();
        if (tag == 1) return childB_->aboveFinite(a.parts()[1]);
        return childA_->aboveFinite(a.parts()[1]) && childB_->size().has_value();
      }
      case Kind::OmegaExp: return orderIsEmpty(term_.child());
    }
    return false;
  }

  std::optional<Ord> orderType() const override {
    if (!wellOrder_) return std::nullopt;
    return orderTypeOf(term_);
  }

  std::optional<Ord> positionOf(const Code& c) const override {
    if (!wellOrder_) return std::nullopt;
    switch (term_.kind()) {
      case Kind::Empty: return std::nullopt;
      case Kind::Fin:
      case Kind::Omega: return Ord::finite(c.leaf());
      case Kind::Rationals: return std::nullopt;
      case Kind::Rev: {
        auto inner = childA_->positionOf(c);
        if (!inner) return std::nullopt;
        uint64_t n = *orderSize(term_.child());
        return Ord::finite(n - 1 - inner->finiteValue());
      }
      case Kind::Sum: {
        uint64_t tag = c.parts()[0].leaf();
        if (tag == 0) return childA_->positionOf(c.parts()[1]);
        auto inner = childB_->positionOf(c.parts()[1]);
        if (!inner) return std::nullopt;
        return orderTypeOf(term_.left()) + *inner;
      }
      case Kind::OmegaExp: {
        Ord pos;
        for (const auto& p : c.parts()) {
          auto e = childA_->positionOf(p);
          if (!e) return std::nullopt;
          pos = pos + Ord::omegaPow(*e);
        }
        return pos;
      }
    }
    return std::nullopt;
  }

  std::optional<Code> pointAtPosition(const Ord& pos) const override {
    if (!wellOrder_) return std::nullopt;
    if (pos >= orderTypeOf(term_)) return std::nullopt;
    switch (term_.kind()) {
      case Kind::Empty: return std::nullopt;
      case Kind::Fin:
      case Kind::Omega: return Code(pos.finiteValue());
      case Kind::Rationals: return std::nullopt;
      case Kind::Rev: {
        uint64_t n = *orderSize(term_.child());
        return childA_->pointAtPosition(Ord::finite(n - 1 - pos.finiteValue()));
      }
      case Kind::Sum: {
        Ord lsize = orderTypeOf(term_.left());
        if (pos < lsize) {
          auto inner = childA_->pointAtPosition(pos);
          if (!inner) return std::nullopt;
          return Code::pair(0, *inner);
        }
        auto inner = childB_->pointAtPosition(Ord::leftSub(lsize, pos));
        if (!inner) return std::nullopt;
        return Code::pair(1, *inner);
      }
      case Kind::OmegaExp: {
        std::vector<Code> entries;
        for (size_t i = 0; i < pos.termCount(); ++i) {
          auto entry = childA_->pointAtPosition(pos.exponentAt(i));
          if (!entry) return std::nullopt;
          for (uint64_t k = 0; k < pos.coefficientAt(i); ++k) entries.push_back(*entry);
        }
        return Code::tuple(std::move(entries));
      }
    }
    return std::nullopt;
  }

  std::string describe() const override { return term_.show(); }

 private:
  static std::optional<Code> wrapSum(uint64_t tag, std::optional<Code> inner) {
    if (!inner) return std::nullopt;
    return Code::pair(tag, std::move(*inner));
  }

  bool intervalFiniteOrdered(const Code& lo, const Code& hi) const {
    switch (term_.kind()) {
      case Kind::Empty:
      case Kind::Fin:
      case Kind::Omega: return true;
      case Kind::Rationals: return false;  // dense: distinct points
      case Kind::Rev: return childA_->intervalFinite(lo, hi);
      case Kind::Sum: {
        uint64_t tl = lo.parts()[0].leaf(), th = hi.parts()[0].leaf();
        if (tl == th) return (tl == 0 ? childA_ : childB_)->intervalFinite(lo.parts()[1], hi.parts()[1]);
        return childA_->aboveFinite(lo.parts()[1]) && childB_->belowFinite(hi.parts()[1]);
      }
      case Kind::OmegaExp: {
        // finite gaps are exactly chains of successors; the successor of a
        // tuple appends the minimum of the base
        auto m = minimumCodeOf(term_.child());
        if (!m) return false;
        const auto& pl = lo.parts();
        const auto& ph = hi.parts();
        if (ph.size() <= pl.size()) return false;
        for (size_t i = 0; i < pl.size(); ++i)
          if (pl[i] != ph[i]) return false;
        for (size_t i = pl.size(); i < ph.size(); ++i)
          if (ph[i] != *m) return false;
        return true;
      }
    }
    return false;
  }

  std::optional<Code> enumerateExp(uint64_t index) const {
    std::lock_guard<std::mutex> lock(mu_);
    while (expCache_.size() <= index) appendWeight();
    return expCache_[index];
  }

  void appendWeight() const {
    uint64_t w = nextWeight_++;
    constexpr uint64_t inf = UINT64_MAX;
    uint64_t cs = childA_->size().value_or(inf);
    // all non-increasing index tuples with length + sum == w, lex-descending
    std::vector<uint64_t> tuple;
    for (uint64_t k = 0; k <= w; ++k) {
      uint64_t s = w - k;
      tuple.clear();
      emitPartitions(k, s, cs == inf ? s : std::min(s, cs - 1), tuple);
    }
  }

  void emitPartitions(uint64_t k, uint64_t s, uint64_t maxPart,
                      std::vector<uint64_t>& tuple) const {
    if (k == 0) {
      if (s == 0) emitTuple(tuple);
      return;
    }
    uint64_t top = std::min(maxPart, s);
    for (uint64_t d = top + 1; d-- > 0;) {
      if (s - d > d * (k - 1)) continue;  // remaining parts are bounded by d
      tuple.push_back(d);
      emitPartitions(k - 1, s - d, d, tuple);
      tuple.pop_back();
      if (d == 0) break;
    }
  }

  void emitTuple(const std::vector<uint64_t>& indexTuple) const {
    std::vector<Code> codes;
    codes.reserve(indexTuple.size());
    for (uint64_t idx : indexTuple) {
      auto c = childA_->enumerate(idx);
      if (!c) throw InternalError("exp stream produced an invalid base index");
      codes.push_back(std::move(*c));
    }
    std::stable_sort(codes.begin(), codes.end(), [this](const Code& x, const Code& y) {
      return childA_->compare(x, y) == Ordering::Greater;
    });
    expCache_.push_back(Code::tuple(std::move(codes)));
  }

  OrderTerm term_;
  std::shared_ptr<const TermPresentation> childA_, childB_;
  bool wellOrder_ = false;
  std::optional<uint64_t> size_;

  mutable std::mutex mu_;
  mutable std::vector<Code> expCache_;
  mutable uint64_t nextWeight_ = 0;
};

}  // namespace

Presentation::Ptr denote(const OrderTerm& t) { return std::make_shared<TermPresentation>(t); }

Ordering comparePoints(const Presentation& p, const Code& a, const Code& b) {
  if (!p.contains(a)) throw DomainError("comparePoints: invalid code " + a.repr());
  if (!p.contains(b)) throw DomainError("comparePoints: invalid code " + b.repr());
  return p.compare(a, b);
}

FiniteOrder prefix(const Presentation& p, uint64_t n) {
  FiniteOrder out;
  for (uint64_t i = 0; i < n; ++i) {
    auto c = p.enumerate(i);
    if (!c) break;
    out.codes.push_back(std::move(*c));
  }
  out.sortedByOrder.resize(out.codes.size());
  for (size_t i = 0; i < out.sortedByOrder.size(); ++i) out.sortedByOrder[i] = i;
  std::sort(out.sortedByOrder.begin(), out.sortedByOrder.end(), [&](size_t i, size_t j) {
    return p.compare(out.codes[i], out.codes[j]) == Ordering::Less;
  });
  return out;
}

std::optional<uint64_t> enumerationIndexOf(const Presentation& p, const Code& c, uint64_t cap) {
  for (uint64_t i = 0; i < cap; ++i) {
    auto e = p.enumerate(i);
    if (!e) return std::nullopt;
    if (*e == c) return i;
  }
  return std::nullopt;
}

bool initialSegmentIso(const Presentation& a, const Presentation& b, uint64_t count) {
  auto ta = a.orderType();
  auto tb = b.orderType();
  if (!ta || !tb || *ta != *tb) return false;
  std::vector<Code> domPts, codPts;
  for (uint64_t i = 0; i < count; ++i) {
    auto c = a.enumerate(i);
    if (!c) break;
    auto pos = a.positionOf(*c);
    if (!pos) return false;
    auto img = b.pointAtPosition(*pos);
    if (!img || !b.contains(*img)) return false;
    domPts.push_back(std::move(*c));
    codPts.push_back(std::move(*img));
  }
  std::set<Code> seen;
  for (const auto& c : codPts)
    if (!seen.insert(c).second) return false;
  for (size_t i = 0; i < domPts.size(); ++i)
    for (size_t j = i + 1; j < domPts.size(); ++j)
      if (a.compare(domPts[i], domPts[j]) != b.compare(codPts[i], codPts[j])) return false;
  return true;
}

}  // namespace ordlab
