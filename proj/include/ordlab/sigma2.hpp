// Compiles bounded decidable relations into families of well orders whose
// embeddings recover truth values.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ordlab/embedding.hpp"
#include "ordlab/presentation.hpp"

namespace ordlab {

// A bounded instance of "exists u, for all v, phi(x,u,v)": phi is a total
// table on x < n, u <= uBound, v <= vBound; entries default to true.
class Sigma2Instance {
 public:
  Sigma2Instance(uint64_t n, uint64_t uBound, uint64_t vBound);

  uint64_t n() const { return n_; }
  uint64_t uBound() const { return uBound_; }
  uint64_t vBound() const { return vBound_; }

  bool phi(uint64_t x, uint64_t u, uint64_t v) const;
  void setPhi(uint64_t x, uint64_t u, uint64_t v, bool value);

  static Sigma2Instance fromJson(const nlohmann::json& j);
  nlohmann::ordered_json toJson() const;

 private:
  uint64_t n_, uBound_, vBound_;
  std::vector<uint8_t> table_;
  size_t slot(uint64_t x, uint64_t u, uint64_t v) const;
};

struct PsiValue {
  bool holds = false;
  uint64_t minU = 0;  // minimal bounded witness when holds
};

// Bounded ground truth: the minimal u <= uBound with phi(x,u,v) for all
// v <= vBound.
PsiValue bruteForcePsi(const Sigma2Instance& inst, uint64_t x);

// k_x(u) = the minimal k > k_x(u-1) such that some v <= k fails phi(x,u,v),
// with k_x(-1) = 0; undefined from the first u whose row is all true.
struct KColumn {
  std::vector<uint64_t> values;             // values[u] = k_x(u), strictly increasing
  std::optional<uint64_t> firstUndefined;   // least undefined u, when <= uBound
};
struct KTable {
  std::vector<KColumn> columns;  // one per x
};
KTable buildKTable(const Sigma2Instance& inst);

// One summand 1 + M of a family member. Omega-typed blocks materialize their
// enumeration to a horizon but decide membership against the full table.
struct Block {
  enum class Kind { FiniteSet, OmegaSet, Separator };
  Kind kind = Kind::Separator;
  std::vector<uint64_t> values;  // ascending; all computed values (not Separator)
  uint64_t enumCount = 0;        // how many values the presentation enumerates
};

struct BlockFamily {
  uint64_t index = 0;
  bool primed = false;
  std::vector<Block> blocks;  // 2n (unprimed) or 4n (primed) summands
};

BlockFamily buildFamily(const Sigma2Instance& inst, uint64_t i);
BlockFamily buildFamilyPrimed(const Sigma2Instance& inst, uint64_t i);

// Points are coded (y, k): k = 0 is the head of summand y, other k are the
// members of M_{i,y}; separators hold every natural.
Presentation::Ptr familyPresentation(const BlockFamily& family);

// For all m < k <= upTo: the even blocks of family k are subsets of those of
// family m and the induced inclusion N_k -> N_m verifies on a prefix.
void descendingChainCheck(const Sigma2Instance& inst, uint64_t upTo);

// The canonical embedding N_i -> N_j (i < j) or N'_i -> N'_j (i != j):
// blocks map in order, a strictly longer source block spills its excess top
// into the following separator, and the separator shifts above the spill.
EmbeddingWitness constructEmbedding(const Sigma2Instance& inst, uint64_t i, uint64_t j,
                                    bool primed);

struct PositionRecovery {
  uint64_t x = 0;
  bool psi = false;
  std::string via;  // "spill", "boundedWitness", or "none"
  std::optional<uint64_t> minU;
};

struct ExtractionReport {
  uint64_t i = 0, j = 0;
  bool primed = false;
  std::vector<uint64_t> spillSet;  // X (or X')
  std::vector<PositionRecovery> perPosition;
  nlohmann::ordered_json toJson() const;
};

// Computes the spill set by bounded scan of F over the finite data of each
// coding block and recovers every psi(x) through the equivalence
// psi(x) <-> x in X or exists u <= i with a bounded all-v witness. The
// recovery is cross-checked against bruteForcePsi; a mismatch throws with the
// offending position.
ExtractionReport extractX(const Sigma2Instance& inst, uint64_t i, uint64_t j,
                          const EmbeddingWitness& F, bool primed);

// F(y,0) >= (y,0) at every even summand head, and every separator point maps
// below the next head. Throws DomainError with the counterexample pair.
void positionalInvariantCheck(const Sigma2Instance& inst, uint64_t i, uint64_t j,
                              const EmbeddingWitness& F, bool primed);

}  // namespace ordlab
