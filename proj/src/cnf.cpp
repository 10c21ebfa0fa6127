#include "ordlab/cnf.hpp"

#include <algorithm>
#include <mutex>

#include "ordlab/errors.hpp"

namespace ordlab {

namespace {

void requireValidEntries(const Presentation& base, const std::vector<Code>& entries) {
  for (const auto& e : entries)
    if (!base.contains(e)) throw DomainError("sequence entry is not a point of the base: " + e.repr());
}

void requireSameBase(const OrderTerm& a, const OrderTerm& b) {
  if (!(a == b))
    throw DomainError("mismatched bases: " + a.show() + " vs " + b.show());
}

}  // namespace

CnfSeq::CnfSeq(OrderTerm base, std::vector<Code> entries)
    : base_(std::move(base)), basePres_(denote(base_)), entries_(std::move(entries)) {
  requireValidEntries(*basePres_, entries_);
  for (size_t i = 0; i + 1 < entries_.size(); ++i)
    if (basePres_->compare(entries_[i], entries_[i + 1]) == Ordering::Less)
      throw DomainError("sequence entries must be non-increasing");
}

bool CnfSeq::operator==(const CnfSeq& o) const {
  return base_ == o.base_ && entries_ == o.entries_;
}

RawSeq::RawSeq(OrderTerm base, std::vector<Code> entries)
    : base_(std::move(base)), basePres_(denote(base_)), entries_(std::move(entries)) {
  requireValidEntries(*basePres_, entries_);
}

Ordering lexCompare(const CnfSeq& sigma, const CnfSeq& tau) {
  requireSameBase(sigma.base(), tau.base());
  const auto& a = sigma.entries();
  const auto& b = tau.entries();
  const Presentation& base = sigma.basePresentation();
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    Ordering c = base.compare(a[i], b[i]);
    if (c != Ordering::Equal) return c;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? Ordering::Less : Ordering::Greater;
  return Ordering::Equal;
}

CnfSeq cnfAdd(const CnfSeq& sigma, const CnfSeq& tau) {
  requireSameBase(sigma.base(), tau.base());
  if (tau.length() == 0) return sigma;
  const Presentation& base = sigma.basePresentation();
  const Code& head = tau.entries()[0];
  size_t i = 0;
  while (i < sigma.length() && base.compare(sigma.entries()[i], head) != Ordering::Less) ++i;
  std::vector<Code> out(sigma.entries().begin(), sigma.entries().begin() + static_cast<long>(i));
  out.insert(out.end(), tau.entries().begin(), tau.entries().end());
  return CnfSeq(sigma.base(), std::move(out));
}

CnfSeq omegaPowerTimes(const OrderTerm& base, const Code& x, uint64_t n) {
  std::vector<Code> entries(n, x);
  return CnfSeq(base, std::move(entries));
}

CnfSeq normalize(const RawSeq& raw) {
  const auto& e = raw.entries();
  const Presentation& base = raw.basePresentation();
  std::vector<Code> out;
  for (size_t i = 0; i < e.size(); ++i) {
    bool keep = true;
    for (size_t j = i + 1; j < e.size(); ++j) {
      if (base.compare(e[i], e[j]) == Ordering::Less) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(e[i]);
  }
  return CnfSeq(raw.base(), std::move(out));
}

Ord ordinalOfCnf(const CnfSeq& sigma) {
  Ord sum;
  for (const auto& e : sigma.entries()) {
    auto pos = sigma.basePresentation().positionOf(e);
    if (!pos) throw DomainError("ordinal of a sequence over a non-well-order base");
    sum = sum + Ord::omegaPow(*pos);
  }
  return sum;
}

// --- segment presentation ----------------------------------------------------

namespace {

class SegmentPresentation : public Presentation {
 public:
  explicit SegmentPresentation(CnfSeq bound)
      : bound_(std::move(bound)),
        parent_(denote(OrderTerm::omegaExp(bound_.base()))),
        boundCode_(bound_.asPoint()) {
    // finite exactly when the bound's initial segment is finite, in which case
    // the points below are the all-minimum shortenings of the bound
    if (parent_->belowFinite(boundCode_)) size_ = bound_.length();
  }

  bool contains(const Code& c) const override {
    return parent_->contains(c) && parent_->compare(c, boundCode_) == Ordering::Less;
  }

  Ordering compare(const Code& a, const Code& b) const override {
    return parent_->compare(a, b);
  }

  std::optional<Code> enumerate(uint64_t index) const override {
    if (size_ && index >= *size_) return std::nullopt;
    std::lock_guard<std::mutex> lock(mu_);
    while (cache_.size() <= index) {
      auto c = parent_->enumerate(nextParent_++);
      if (!c) return std::nullopt;
      if (parent_->compare(*c, boundCode_) == Ordering::Less) cache_.push_back(std::move(*c));
    }
    return cache_[index];
  }

  std::optional<uint64_t> size() const override { return size_; }

  bool intervalFinite(const Code& a, const Code& b) const override {
    return parent_->intervalFinite(a, b);
  }

  bool belowFinite(const Code& b) const override { return parent_->belowFinite(b); }

  bool aboveFinite(const Code& a) const override {
    // the segment's final segment above a is the parent interval (a, bound)
    return parent_->intervalFinite(a, boundCode_);
  }

  std::optional<Ord> orderType() const override {
    if (!classify(bound_.base()).isWellOrder) return std::nullopt;
    return ordinalOfCnf(bound_);
  }

  std::optional<Ord> positionOf(const Code& c) const override {
    return parent_->positionOf(c);  // initial segments inherit positions
  }

  std::optional<Code> pointAtPosition(const Ord& pos) const override {
    auto t = orderType();
    if (!t || pos >= *t) return std::nullopt;
    return parent_->pointAtPosition(pos);
  }

  std::string describe() const override {
    return "segment below " + boundCode_.repr() + " of W(" + bound_.base().show() + ")";
  }

 private:
  CnfSeq bound_;
  Presentation::Ptr parent_;
  Code boundCode_;
  std::optional<uint64_t> size_;

  mutable std::mutex mu_;
  mutable std::vector<Code> cache_;
  mutable uint64_t nextParent_ = 0;
};

}  // namespace

Presentation::Ptr segmentOf(const CnfSeq& sigma) {
  return std::make_shared<SegmentPresentation>(sigma);
}

// --- the stage notation system and the structural route -----------------------

OrderTerm cnfStageBase() { return OrderTerm::sum(OrderTerm::omega(), OrderTerm::fin(1)); }

Code stageCodeFinite(uint64_t k) { return Code::pair(0, Code(k)); }
Code stageCodeOmega() { return Code::pair(1, Code(0)); }

CnfSeq structuralCnf(const OrderTerm& t) {
  if (!classify(t).isWellOrder)
    throw DomainError("structural CNF requested for a non-well-order term: " + t.show());
  OrderTerm base = cnfStageBase();
  switch (t.kind()) {
    case OrderTerm::Kind::Empty: return CnfSeq(base, {});
    case OrderTerm::Kind::Fin:
      return omegaPowerTimes(base, stageCodeFinite(0), t.finCount());
    case OrderTerm::Kind::Omega: return omegaPowerTimes(base, stageCodeFinite(1), 1);
    case OrderTerm::Kind::Rev:
      return omegaPowerTimes(base, stageCodeFinite(0), *orderSize(t.child()));
    case OrderTerm::Kind::Sum:
      return cnfAdd(structuralCnf(t.left()), structuralCnf(t.right()));
    case OrderTerm::Kind::OmegaExp: {
      Ord exp = orderTypeOf(t.child());
      if (exp.isFinite()) return omegaPowerTimes(base, stageCodeFinite(exp.finiteValue()), 1);
      if (exp == Ord::omega()) return omegaPowerTimes(base, stageCodeOmega(), 1);
      throw OutOfRangeError("CNF exponent above omega: " + exp.show());
    }
    case OrderTerm::Kind::Rationals: break;
  }
  throw DomainError("structural CNF requested for a non-well-order term: " + t.show());
}

RawSeq rawFromIndices(const OrderTerm& base, const std::vector<uint64_t>& indices) {
  auto p = denote(base);
  std::vector<Code> entries;
  entries.reserve(indices.size());
  for (uint64_t i : indices) {
    auto c = p->enumerate(i);
    if (!c) throw DomainError("entry index " + std::to_string(i) + " is past the end of the base");
    entries.push_back(std::move(*c));
  }
  return RawSeq(base, std::move(entries));
}

CnfSeq cnfFromIndices(const OrderTerm& base, const std::vector<uint64_t>& indices) {
  RawSeq raw = rawFromIndices(base, indices);
  return CnfSeq(raw.base(), raw.entries());
}

}  // namespace ordlab
