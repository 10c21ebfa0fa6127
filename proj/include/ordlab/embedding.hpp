// Construction, verification, search, and refutation of embeddings between
// countable orders.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ordlab/cnf.hpp"
#include "ordlab/presentation.hpp"

namespace ordlab {

// A witness is either a finite association of points or a named closed-form
// rule. Rules can be sampled on arbitrarily deep prefixes, which is what lets
// a verifier certify statements about infinite orders.
class EmbeddingWitness {
 public:
  using ApplyFn = std::function<std::optional<Code>(const Code&)>;

  static EmbeddingWitness finiteMap(std::vector<std::pair<Code, Code>> pairs);
  static EmbeddingWitness rule(std::string name, nlohmann::ordered_json params, ApplyFn fn);

  bool isFiniteMap() const { return finite_ != nullptr; }
  const std::string& name() const { return name_; }

  // nullopt means the witness is undefined at the point.
  std::optional<Code> apply(const Code& c) const;

  nlohmann::ordered_json toJson() const;

  // When present: the witness claims its range lies strictly below this point
  // (a proper-initial-segment claim).
  std::optional<Code> claimedBound;
  // When present: the term whose denotation the witness maps within; used by
  // intervalLift to locate the designated interval.
  std::optional<OrderTerm> domainTerm;

 private:
  std::string name_;
  nlohmann::ordered_json params_;
  ApplyFn fn_;
  std::shared_ptr<const std::vector<std::pair<Code, Code>>> finite_;
};

EmbeddingWitness composeWitness(std::string name, EmbeddingWitness first,
                                EmbeddingWitness second);  // second after first

struct VerifyResult {
  bool verified = false;
  std::optional<std::pair<Code, Code>> violation;  // a < b with f(a) >= f(b)
  std::optional<Code> invalidImage;                // image outside the codomain
};

// Strict order preservation on all pairs of the first sampleSize enumerated
// domain points. Undefined on a sampled point -> IncompleteWitnessError.
VerifyResult verifyEmbedding(const EmbeddingWitness& w, const Presentation& dom,
                             const Presentation& cod, uint64_t sampleSize);

// The orbit start, f(start), f(f(start)), ..., strictly descending; a
// non-descending step means the witness was not an embedding into a proper
// initial segment and raises DomainError.
std::vector<Code> extractDescending(const EmbeddingWitness& w, const Presentation& p,
                                    const Code& start, uint64_t steps);

// A canonical strictly descending sequence in an ill-founded term, read off
// the term structure. DomainError for well-founded terms.
std::vector<Code> canonicalDescent(const OrderTerm& t, size_t length);

// i -> i+1 on rev(w); embeds the whole order strictly below its first point.
EmbeddingWitness omegaStarShift();

// Index substitution along a verified descent x_0 > x_1 > ... in denote(t):
// maps W(rev(w)) tuples <i_0,...> to <x_{1+i_0},...>, landing strictly below
// <x_0> inside W(t).
EmbeddingWitness selfEmbedIllFounded(const OrderTerm& t, const std::vector<Code>& descent);

// One-sided deterministic back-and-forth embedding of p into the dense order
// Y = W(rev(w)) minus its least point.
EmbeddingWitness denseEmbed(const Presentation::Ptr& p);

// Self-embedding of a non-scattered term into a proper initial segment,
// routed through a dense channel: an embedding into the rationals, a shift
// below a fixed rational, and an injection back through the channel.
EmbeddingWitness selfEmbedNonScattered(const OrderTerm& t);

// Self-embedding of a scattered ill-founded term, located structurally.
EmbeddingWitness selfEmbedScattered(const OrderTerm& t);

// Any ill-founded term: dispatches to the scattered or dense-channel route.
EmbeddingWitness selfEmbedAny(const OrderTerm& t);

// The composed Thm-style witness on W(t) for ill-founded t: dense embedding
// into Y followed by index substitution. descentLength bounds the substitution
// table; the claimed bound is <x_0>.
EmbeddingWitness omegaExpSelfEmbed(const OrderTerm& t, size_t descentLength);

// id on everything left of the designated interval plus the given witness on
// it. The interval is the leftmost subterm equal to w.domainTerm reachable
// through Sum nodes only.
EmbeddingWitness intervalLift(const OrderTerm& outer, const EmbeddingWitness& w);

// The I + J region of denote(outer) the lifted witness is defined on.
Presentation::Ptr intervalLiftDomain(const OrderTerm& outer, const EmbeddingWitness& w);

// --- refutation of segment self-embeddings -------------------------------------

struct RefutationStep {
  Code exponent;  // y_i, strictly descending across steps
  uint64_t k;
  uint64_t m;
};

struct RefutationTrace {
  enum class Terminal {
    OrderViolation,    // a < b with f(a) >= f(b)
    CodomainEscape,    // an image left the claimed codomain
    ExponentOverflow,  // the descent collapsed at the least exponent
    BudgetExceeded,
  };
  std::vector<RefutationStep> steps;
  Terminal terminal = Terminal::BudgetExceeded;
  std::optional<std::pair<Code, Code>> violationPair;
  std::optional<Code> escapePoint;
  uint64_t queriesUsed = 0;
};

// Runs the pigeonhole recursion against a claimed embedding of the segment
// omega^x into omega^y * n (x > y over a well-order base). Each step records
// (y_i, k_i, m_i) with the y_i strictly descending; the run ends in a direct
// order violation or the exponent floor. Budget counts witness queries.
RefutationTrace refuteExponentDrop(const EmbeddingWitness& f, const OrderTerm& base,
                                   const Code& x, const Code& y, uint64_t n, uint64_t budget);

struct SegmentCheckResult {
  enum class Kind { Refuted, Violation, Vacuous };
  Kind kind;
  std::optional<RefutationTrace> trace;            // Refuted
  std::optional<std::pair<Code, Code>> violation;  // Violation
  size_t failedPrefixLength = 0;                   // j at which the walk delegated
};

// Walks the prefixes sigma[j] of the witness's claimed bound, maintaining
// sigma[j] <= f(sigma[j]); at the failing step it extracts the induced map
// between omega-powers and delegates to refuteExponentDrop. The witness must
// carry a claimed bound strictly below sigma.
SegmentCheckResult checkNoSegmentSelfEmbedding(const CnfSeq& sigma, const EmbeddingWitness& f,
                                               uint64_t budget);

// --- index extraction from sums over reversed omega ----------------------------

// The order sum_{i in rev(w)} X_i where X_i = terms[min(i, terms.size()-1)],
// points coded (i, x). Block 0 is topmost.
Presentation::Ptr ambientOmegaStarSum(std::vector<OrderTerm> terms);

// An initial segment of the ambient order: every block with index > blockIndex
// entirely, plus the part of block blockIndex strictly below `bound`
// (the whole block when bound is absent).
struct AmbientSegment {
  uint64_t blockIndex = 0;
  std::optional<Code> bound;
};

struct FraisseResult {
  uint64_t fromIndex;  // i with i < j
  uint64_t toIndex;    // j
  EmbeddingWitness witness;  // X_fromIndex -> X_toIndex, verified
};

// Given indecomposable well-order terms (each of order type omega^a) and an
// embedding f of the initial segment `dom` into the shorter initial segment
// `cod`, extracts indices i < j with a verified witness X_i -> X_j.
FraisseResult fraisseExtract(const std::vector<OrderTerm>& terms, const EmbeddingWitness& f,
                             const AmbientSegment& dom, const AmbientSegment& cod);

// Block shift (i, x) -> (i+1, same position) on the ambient order; an
// embedding when each block embeds into the next.
EmbeddingWitness ambientBlockShift(std::vector<OrderTerm> terms);

// --- bounded search -------------------------------------------------------------

struct SearchResult {
  bool found = false;
  std::vector<std::pair<Code, Code>> map;  // when found
  uint64_t noneUpTo = 0;                   // when not found
};

// Order-preserving maps of dom's first prefixSize points into cod's first
// 4*prefixSize enumerated points. For linear orders the leftmost ascending
// matching is complete, so a negative is exact for this horizon and no more:
// a bounded negative, not a theorem.
SearchResult searchEmbedding(const Presentation& dom, const Presentation& cod,
                             uint64_t prefixSize);

// --- deterministic adversaries (used by the CLI and the test suites) -----------

// A total, deterministic candidate map claiming to embed segmentOf(sigma) into
// a proper initial segment; the claimed bound is derived from sigma and seed.
EmbeddingWitness adversarialSegmentMap(const CnfSeq& sigma, uint64_t seed);

// Greedy order-preserving extension into segmentOf(target): answers each query
// with the least enumerated consistent point, memoized; returns a forced
// violation when no consistent point exists.
EmbeddingWitness greedyExtensionMap(const CnfSeq& target);

}  // namespace ordlab
