// Hausdorff derivatives, rank, and Cantor normal form extraction by the
// per-stage neighbourhood recursion.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ordlab/cnf.hpp"
#include "ordlab/presentation.hpp"

namespace ordlab {

// Stage tags: the finite stages and the single supported limit stage omega.
struct StageTag {
  bool limit = false;
  uint64_t value = 0;

  static StageTag finite(uint64_t n) { return StageTag{false, n}; }
  static StageTag omega() { return StageTag{true, 0}; }

  bool operator==(const StageTag& o) const { return limit == o.limit && value == o.value; }
  std::string show() const { return limit ? "w" : std::to_string(value); }
};

// The stage-beta equivalence restricted to an enumerated prefix. Classes are
// intervals, numbered ascending in the order; the representative of a class is
// its member with the least enumeration index.
struct StageRelation {
  StageTag stage;
  std::vector<Code> points;        // the prefix, in enumeration order
  std::vector<size_t> classOf;     // per point index
  size_t classCount = 0;
  std::vector<size_t> repIndexOf;  // per class: index into points
};

// The identity partition on the first prefixSize enumerated points.
StageRelation initialStage(const Presentation::Ptr& p, uint64_t prefixSize);

// One successor step: two points become equivalent when the interval between
// them meets only finitely many previous-stage classes, decided exactly from
// the term structure. Throws UnsupportedPresentationError when the needed
// class-level oracle is unavailable (stages >= 2 need a well-ordered backing).
StageRelation derivativeStep(const Presentation::Ptr& p, const StageRelation& prev);

// The stage-omega relation: the union of all finite-stage relations, computed
// exactly. `stages` must be the computed contiguous finite-stage sequence; it
// is checked for consistency. Only lambda = omega is supported.
StageRelation limitStage(const Presentation::Ptr& p, const std::vector<StageRelation>& stages,
                         StageTag lambda = StageTag::omega());

struct StageCount {
  StageTag stage;
  uint64_t classes;
};

struct RankResult {
  StageTag rank;
  Code witnessPoint;              // the single stage-rank class representative
  std::vector<StageCount> trace;  // class counts per computed stage
};

// Hausdorff rank of a scattered well-order term; supported up to stage omega.
RankResult rank(const OrderTerm& t);

// Cantor normal form over cnfStageBase() via the stage recursion: decompose
// each stage-(beta+1) neighbourhood into its stage-beta blocks, concatenate
// and normalize when finitely many, apply the omega-power case when
// infinitely many, and glue through the limit stage. The result names a
// segment isomorphic to denote(t), verified on a prefix before returning.
CnfSeq cnfViaHausdorff(const OrderTerm& t);

}  // namespace ordlab
