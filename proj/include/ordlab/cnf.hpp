// The omega(X) notation system: non-increasing exponent sequences over a base
// order, lexicographic comparison, ordinal sum, omega-power multiples,
// normalization, and initial-segment presentations.
#pragma once

#include <cstdint>
#include <vector>

#include "ordlab/presentation.hpp"
#include "ordlab/term.hpp"

namespace ordlab {

// A finite non-increasing sequence of points of denote(base); names the
// initial segment of W(base) strictly below itself. Validated on construction.
class CnfSeq {
 public:
  CnfSeq(OrderTerm base, std::vector<Code> entries);

  const OrderTerm& base() const { return base_; }
  const Presentation& basePresentation() const { return *basePres_; }
  Presentation::Ptr basePresentationPtr() const { return basePres_; }
  const std::vector<Code>& entries() const { return entries_; }
  size_t length() const { return entries_.size(); }

  // The sequence as a point of denote(W(base)).
  Code asPoint() const { return Code::tuple(entries_); }

  bool operator==(const CnfSeq& o) const;

 private:
  OrderTerm base_;
  Presentation::Ptr basePres_;
  std::vector<Code> entries_;
};

// Pre-normalization carrier: entries are valid codes, monotonicity not
// required.
class RawSeq {
 public:
  RawSeq(OrderTerm base, std::vector<Code> entries);

  const OrderTerm& base() const { return base_; }
  const Presentation& basePresentation() const { return *basePres_; }
  const std::vector<Code>& entries() const { return entries_; }

 private:
  OrderTerm base_;
  Presentation::Ptr basePres_;
  std::vector<Code> entries_;
};

// Strict total order on sequences over one base: entrywise comparison at the
// first divergence, proper prefixes first. Mismatched bases -> DomainError.
Ordering lexCompare(const CnfSeq& sigma, const CnfSeq& tau);

// sigma + tau = <sigma_0,...,sigma_{i-1},tau_0,...> where i < l(sigma) is
// minimal with sigma_i < tau_0 (left-to-right scan), i = l(sigma) if none.
CnfSeq cnfAdd(const CnfSeq& sigma, const CnfSeq& tau);

// The n-fold constant sequence <x,...,x>; n = 1 names omega^x.
CnfSeq omegaPowerTimes(const OrderTerm& base, const Code& x, uint64_t n);

// Deletes every entry that is smaller than some later entry.
CnfSeq normalize(const RawSeq& raw);

// Presentation of the initial segment of denote(W(base)) strictly below sigma.
Presentation::Ptr segmentOf(const CnfSeq& sigma);

// Order type of the named segment as an ordinal; base must be well ordered.
Ord ordinalOfCnf(const CnfSeq& sigma);

// Entries for the stage notation system: the base order w + 1 whose points
// code the finite stages and the limit stage.
OrderTerm cnfStageBase();
Code stageCodeFinite(uint64_t k);
Code stageCodeOmega();

// Cantor normal form over cnfStageBase() computed by structural recursion with
// cnfAdd/normalize; requires a well-order term. Throws OutOfRangeError when an
// exponent would exceed the stage base (order type above omega^omega).
CnfSeq structuralCnf(const OrderTerm& t);

// Sequence construction from enumeration indices of the base (CLI input form).
RawSeq rawFromIndices(const OrderTerm& base, const std::vector<uint64_t>& indices);
CnfSeq cnfFromIndices(const OrderTerm& base, const std::vector<uint64_t>& indices);

}  // namespace ordlab
