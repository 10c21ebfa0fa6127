#include "ordlab/sigma2.hpp"

#include <algorithm>
#include <mutex>

#include "ordlab/errors.hpp"

namespace ordlab {

namespace {
constexpr uint64_t kOmegaBlockMargin = 4;   // enumeration headroom for shifted embeddings
constexpr uint64_t kSeparatorSample = 30;
}  // namespace

Sigma2Instance::Sigma2Instance(uint64_t n, uint64_t uBound, uint64_t vBound)
    : n_(n), uBound_(uBound), vBound_(vBound) {
  if (n_ == 0) throw DomainError("instance needs at least one position");
  if (uBound_ == 0 || vBound_ == 0) throw DomainError("bounds must be at least 1");
  table_.assign(n_ * (uBound_ + 1) * (vBound_ + 1), 1);
}

size_t Sigma2Instance::slot(uint64_t x, uint64_t u, uint64_t v) const {
  return static_cast<size_t>((x * (uBound_ + 1) + u) * (vBound_ + 1) + v);
}

bool Sigma2Instance::phi(uint64_t x, uint64_t u, uint64_t v) const {
  if (x >= n_ || u > uBound_ || v > vBound_)
    throw DomainError("phi queried outside the bounded grid");
  return table_[slot(x, u, v)] != 0;
}

void Sigma2Instance::setPhi(uint64_t x, uint64_t u, uint64_t v, bool value) {
  if (x >= n_ || u > uBound_ || v > vBound_)
    throw DomainError("phi assigned outside the bounded grid");
  table_[slot(x, u, v)] = value ? 1 : 0;
}

Sigma2Instance Sigma2Instance::fromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("uBound") || !j.contains("vBound"))
    throw DomainError("instance JSON needs n, uBound, vBound");
  Sigma2Instance inst(j.at("n").get<uint64_t>(), j.at("uBound").get<uint64_t>(),
                      j.at("vBound").get<uint64_t>());
  if (j.contains("phi")) {
    for (const auto& row : j.at("phi")) {
      if (!row.is_array() || row.size() != 4)
        throw DomainError("phi rows must be [x, u, v, bool]");
      inst.setPhi(row[0].get<uint64_t>(), row[1].get<uint64_t>(), row[2].get<uint64_t>(),
                  row[3].get<bool>());
    }
  }
  return inst;
}

nlohmann::ordered_json Sigma2Instance::toJson() const {
  nlohmann::ordered_json j;
  j["n"] = n_;
  j["uBound"] = uBound_;
  j["vBound"] = vBound_;
  auto rows = nlohmann::ordered_json::array();
  for (uint64_t x = 0; x < n_; ++x)
    for (uint64_t u = 0; u <= uBound_; ++u)
      for (uint64_t v = 0; v <= vBound_; ++v)
        if (!phi(x, u, v)) rows.push_back({x, u, v, false});
  j["phi"] = std::move(rows);
  return j;
}

PsiValue bruteForcePsi(const Sigma2Instance& inst, uint64_t x) {
  for (uint64_t u = 0; u <= inst.uBound(); ++u) {
    bool all = true;
    for (uint64_t v = 0; v <= inst.vBound(); ++v)
      if (!inst.phi(x, u, v)) {
        all = false;
        break;
      }
    if (all) return PsiValue{true, u};
  }
  return PsiValue{false, 0};
}

KTable buildKTable(const Sigma2Instance& inst) {
  KTable table;
  table.columns.resize(inst.n());
  for (uint64_t x = 0; x < inst.n(); ++x) {
    KColumn& col = table.columns[x];
    uint64_t prev = 0;  // k_x(-1)
    for (uint64_t u = 0; u <= inst.uBound(); ++u) {
      std::optional<uint64_t> failV;
      for (uint64_t v = 0; v <= inst.vBound(); ++v)
        if (!inst.phi(x, u, v)) {
          failV = v;
          break;
        }
      if (!failV) {
        col.firstUndefined = u;
        break;
      }
      uint64_t k = std::max(prev + 1, *failV);
      if (k <= prev) throw InternalError("k-table must be strictly increasing");
      if (u > k) throw InternalError("k-table violated u <= k_x(u)");
      col.values.push_back(k);
      prev = k;
    }
  }
  return table;
}

// --- block families ------------------------------------------------------------

namespace {

Block separatorBlock() {
  Block b;
  b.kind = Block::Kind::Separator;
  return b;
}

// M_{i,2x} = { k_x(u) : u >= i }, finite exactly when psi(x) holds
Block evenBlock(const KColumn& col, uint64_t i, uint64_t uBound) {
  Block b;
  for (uint64_t u = i; u < col.values.size(); ++u) b.values.push_back(col.values[u]);
  if (col.firstUndefined) {
    b.kind = Block::Kind::FiniteSet;
    b.enumCount = b.values.size();
  } else {
    b.kind = Block::Kind::OmegaSet;
    uint64_t horizon = uBound >= kOmegaBlockMargin ? uBound - kOmegaBlockMargin : 0;
    b.enumCount = horizon >= i ? horizon - i + 1 : 0;
    if (b.enumCount > b.values.size()) b.enumCount = b.values.size();
  }
  return b;
}

// M'_{i,4x+2}: i low points plus the shifted k-table; order type i+u when
// psi(x) holds with minimal witness u, omega otherwise
Block primedMiddleBlock(const KColumn& col, uint64_t i, uint64_t uBound) {
  Block b;
  for (uint64_t k = 1; k <= i; ++k) b.values.push_back(k);
  for (uint64_t u = 0; u < col.values.size(); ++u) b.values.push_back(i + col.values[u]);
  if (col.firstUndefined) {
    b.kind = Block::Kind::FiniteSet;
    b.enumCount = b.values.size();
  } else {
    b.kind = Block::Kind::OmegaSet;
    uint64_t horizon = uBound >= kOmegaBlockMargin ? uBound - kOmegaBlockMargin : 0;
    b.enumCount = i + horizon + 1;
    if (b.enumCount > b.values.size()) b.enumCount = b.values.size();
  }
  return b;
}

void checkCharacterization(const Sigma2Instance& inst, const BlockFamily& fam) {
  for (uint64_t x = 0; x < inst.n(); ++x) {
    PsiValue psi = bruteForcePsi(inst, x);
    uint64_t evenPos = fam.primed ? 4 * x : 2 * x;
    const Block& mb = fam.blocks[evenPos];
    if (psi.holds) {
      uint64_t expected = psi.minU > fam.index ? psi.minU - fam.index : 0;
      if (mb.kind != Block::Kind::FiniteSet || mb.values.size() != expected)
        throw InternalError("even block characterization mismatch");
    } else if (mb.kind != Block::Kind::OmegaSet) {
      throw InternalError("even block characterization mismatch");
    }
    if (fam.primed) {
      const Block& pb = fam.blocks[4 * x + 2];
      if (psi.holds) {
        if (pb.kind != Block::Kind::FiniteSet || pb.values.size() != fam.index + psi.minU)
          throw InternalError("primed middle block characterization mismatch");
      } else if (pb.kind != Block::Kind::OmegaSet) {
        throw InternalError("primed middle block characterization mismatch");
      }
    }
  }
}

}  // namespace

BlockFamily buildFamily(const Sigma2Instance& inst, uint64_t i) {
  KTable kt = buildKTable(inst);
  BlockFamily fam;
  fam.index = i;
  fam.primed = false;
  for (uint64_t x = 0; x < inst.n(); ++x) {
    fam.blocks.push_back(evenBlock(kt.columns[x], i, inst.uBound()));
    fam.blocks.push_back(separatorBlock());
  }
  checkCharacterization(inst, fam);
  return fam;
}

BlockFamily buildFamilyPrimed(const Sigma2Instance& inst, uint64_t i) {
  KTable kt = buildKTable(inst);
  BlockFamily fam;
  fam.index = i;
  fam.primed = true;
  for (uint64_t x = 0; x < inst.n(); ++x) {
    fam.blocks.push_back(evenBlock(kt.columns[x], i, inst.uBound()));
    fam.blocks.push_back(separatorBlock());
    fam.blocks.push_back(primedMiddleBlock(kt.columns[x], i, inst.uBound()));
    fam.blocks.push_back(separatorBlock());
  }
  checkCharacterization(inst, fam);
  return fam;
}

// --- family presentation ---------------------------------------------------------

namespace {

class FamilyPresentation : public Presentation {
 public:
  explicit FamilyPresentation(BlockFamily fam) : fam_(std::move(fam)) {}

  const BlockFamily& family() const { return fam_; }

  bool contains(const Code& c) const override {
    if (c.isLeaf() || c.parts().size() != 2 || !c.parts()[0].isLeaf() || !c.parts()[1].isLeaf())
      return false;
    uint64_t y = c.parts()[0].leaf(), k = c.parts()[1].leaf();
    if (y >= fam_.blocks.size()) return false;
    if (k == 0) return true;  // the head of the summand
    const Block& b = fam_.blocks[y];
    if (b.kind == Block::Kind::Separator) return true;
    return std::binary_search(b.values.begin(), b.values.end(), k);
  }

  Ordering compare(const Code& a, const Code& b) const override {
    uint64_t ya = a.parts()[0].leaf(), yb = b.parts()[0].leaf();
    if (ya != yb) return ya < yb ? Ordering::Less : Ordering::Greater;
    uint64_t ka = a.parts()[1].leaf(), kb = b.parts()[1].leaf();
    return ka < kb ? Ordering::Less : (ka == kb ? Ordering::Equal : Ordering::Greater);
  }

  std::optional<Code> enumerate(uint64_t index) const override {
    std::lock_guard<std::mutex> lock(mu_);
    if (streams_.empty()) streams_.assign(fam_.blocks.size(), 0);
    while (cache_.size() <= index) {
      bool emitted = false;
      for (uint64_t y = 0; y < fam_.blocks.size(); ++y) {
        auto pt = pointInBlock(y, streams_[y]);
        if (pt) {
          ++streams_[y];
          cache_.push_back(*pt);
          emitted = true;
        }
      }
      if (!emitted) return std::nullopt;  // every summand exhausted
    }
    return cache_[index];
  }

  std::optional<uint64_t> size() const override {
    return std::nullopt;  // separators are infinite
  }

  bool intervalFinite(const Code& a, const Code& b) const override {
    Ordering o = compare(a, b);
    if (o == Ordering::Equal) return true;
    const Code& lo = o == Ordering::Less ? a : b;
    const Code& hi = o == Ordering::Less ? b : a;
    uint64_t yl = lo.parts()[0].leaf(), yh = hi.parts()[0].leaf();
    if (yl == yh) return true;  // suborders of the naturals
    if (!blockAboveFinite(yl, lo.parts()[1].leaf())) return false;
    for (uint64_t y = yl + 1; y < yh; ++y)
      if (!blockFinite(y)) return false;
    return true;  // below a natural there are finitely many points
  }

  bool belowFinite(const Code& b) const override {
    uint64_t y = b.parts()[0].leaf();
    for (uint64_t k = 0; k < y; ++k)
      if (!blockFinite(k)) return false;
    return true;
  }

  bool aboveFinite(const Code& a) const override {
    uint64_t y = a.parts()[0].leaf();
    if (!blockAboveFinite(y, a.parts()[1].leaf())) return false;
    for (uint64_t k = y + 1; k < fam_.blocks.size(); ++k)
      if (!blockFinite(k)) return false;
    return true;
  }

  std::string describe() const override {
    return std::string(fam_.primed ? "N'_" : "N_") + std::to_string(fam_.index);
  }

 private:
  bool blockFinite(uint64_t y) const {
    return fam_.blocks[y].kind == Block::Kind::FiniteSet;
  }

  bool blockAboveFinite(uint64_t y, uint64_t) const {
    return blockFinite(y);  // a final segment of omega or a separator is infinite
  }

  std::optional<Code> pointInBlock(uint64_t y, uint64_t idx) const {
    const Block& b = fam_.blocks[y];
    if (idx == 0) return Code::pair(y, Code(0));
    if (b.kind == Block::Kind::Separator) return Code::pair(y, Code(idx));
    if (idx - 1 < b.enumCount) return Code::pair(y, Code(b.values[idx - 1]));
    return std::nullopt;
  }

  BlockFamily fam_;
  mutable std::mutex mu_;
  mutable std::vector<Code> cache_;
  mutable std::vector<uint64_t> streams_;
};

}  // namespace

Presentation::Ptr familyPresentation(const BlockFamily& family) {
  return std::make_shared<FamilyPresentation>(family);
}

// --- descending chain -------------------------------------------------------------

void descendingChainCheck(const Sigma2Instance& inst, uint64_t upTo) {
  KTable kt = buildKTable(inst);
  for (uint64_t k = 1; k <= upTo; ++k) {
    for (uint64_t m = 0; m < k; ++m) {
      for (uint64_t x = 0; x < inst.n(); ++x) {
        // M_{k,2x} drops the first k-m values of M_{m,2x}; set inclusion
        const auto& col = kt.columns[x].values;
        for (uint64_t u = k; u < col.size(); ++u) {
          bool found = false;
          for (uint64_t w = m; w < col.size(); ++w)
            if (col[w] == col[u]) found = true;
          if (!found) throw InternalError("descending chain inclusion failed");
        }
      }
      BlockFamily famK = buildFamily(inst, k);
      BlockFamily famM = buildFamily(inst, m);
      EmbeddingWitness inclusion = EmbeddingWitness::rule(
          "familyInclusion", {}, [](const Code& c) -> std::optional<Code> { return c; });
      auto pk = familyPresentation(famK);
      auto pm = familyPresentation(famM);
      VerifyResult vr = verifyEmbedding(inclusion, *pk, *pm, 60);
      if (!vr.verified) throw InternalError("descending chain witness failed verification");
    }
  }
}

// --- the canonical embedding --------------------------------------------------------

namespace {

struct BlockMap {
  // source value (ascending rank a) -> target value, or a spill into the
  // following separator
  std::vector<uint64_t> srcValues;   // full computed source values
  std::vector<uint64_t> tgtValues;   // full computed target values
  uint64_t spill = 0;                // source values that overflow into the separator
};

}  // namespace

EmbeddingWitness constructEmbedding(const Sigma2Instance& inst, uint64_t i, uint64_t j,
                                    bool primed) {
  if (!primed && i >= j) throw DomainError("the unprimed construction needs i < j");
  if (primed && i == j) throw DomainError("the primed construction needs i != j");

  BlockFamily src = primed ? buildFamilyPrimed(inst, i) : buildFamily(inst, i);
  BlockFamily tgt = primed ? buildFamilyPrimed(inst, j) : buildFamily(inst, j);

  auto maps = std::make_shared<std::vector<BlockMap>>();
  maps->resize(src.blocks.size());
  for (uint64_t y = 0; y < src.blocks.size(); ++y) {
    if (src.blocks[y].kind == Block::Kind::Separator) continue;
    BlockMap bm;
    bm.srcValues = src.blocks[y].values;
    bm.tgtValues = tgt.blocks[y].values;
    if (src.blocks[y].kind == Block::Kind::FiniteSet) {
      bm.spill = bm.srcValues.size() > bm.tgtValues.size()
                     ? bm.srcValues.size() - bm.tgtValues.size()
                     : 0;
    }
    (*maps)[y] = std::move(bm);
  }

  nlohmann::ordered_json params;
  params["i"] = i;
  params["j"] = j;
  params["primed"] = primed;
  return EmbeddingWitness::rule(
      "canonicalFamilyEmbedding", std::move(params),
      [maps](const Code& c) -> std::optional<Code> {
        if (c.isLeaf() || c.parts().size() != 2) return std::nullopt;
        uint64_t y = c.parts()[0].leaf(), k = c.parts()[1].leaf();
        if (y >= maps->size()) return std::nullopt;
        if (k == 0) return Code::pair(y, Code(0));  // heads map to heads
        const BlockMap& bm = (*maps)[y];
        bool isSeparator = y % 2 == 1;
        if (isSeparator) {
          uint64_t shift = y > 0 ? (*maps)[y - 1].spill : 0;
          return Code::pair(y, Code(k + shift));
        }
        auto it = std::lower_bound(bm.srcValues.begin(), bm.srcValues.end(), k);
        if (it == bm.srcValues.end() || *it != k) return std::nullopt;
        uint64_t rank = static_cast<uint64_t>(it - bm.srcValues.begin());
        uint64_t fit = bm.srcValues.size() - bm.spill;
        if (rank < fit) {
          if (rank >= bm.tgtValues.size()) return std::nullopt;  // beyond the horizon
          return Code::pair(y, Code(bm.tgtValues[rank]));
        }
        return Code::pair(y + 1, Code(rank - fit));  // spill into the separator
      });
}

// --- extraction -----------------------------------------------------------------------

nlohmann::ordered_json ExtractionReport::toJson() const {
  nlohmann::ordered_json out;
  out["i"] = i;
  out["j"] = j;
  out["primed"] = primed;
  out["X"] = spillSet;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& pr : perPosition) {
    nlohmann::ordered_json e;
    e["x"] = pr.x;
    e["psi"] = pr.psi;
    e["via"] = pr.via;
    if (pr.minU) e["minU"] = *pr.minU;
    arr.push_back(std::move(e));
  }
  out["perPosition"] = std::move(arr);
  return out;
}

ExtractionReport extractX(const Sigma2Instance& inst, uint64_t i, uint64_t j,
                          const EmbeddingWitness& F, bool primed) {
  BlockFamily src = primed ? buildFamilyPrimed(inst, i) : buildFamily(inst, i);
  BlockFamily tgt = primed ? buildFamilyPrimed(inst, j) : buildFamily(inst, j);
  auto srcPres = familyPresentation(src);
  auto tgtPres = familyPresentation(tgt);

  VerifyResult vr = verifyEmbedding(F, *srcPres, *tgtPres, 100);
  if (!vr.verified)
    throw DomainError("violation: the supplied family map failed verification");

  ExtractionReport report;
  report.i = i;
  report.j = j;
  report.primed = primed;

  // the coding blocks watched for spills: 2x unprimed; primed watches 4x for
  // i < j and 4x+2 for i > j
  for (uint64_t x = 0; x < inst.n(); ++x) {
    uint64_t watched = primed ? (i < j ? 4 * x : 4 * x + 2) : 2 * x;
    const Block& b = src.blocks[watched];
    bool inX = false;
    for (uint64_t v : b.values) {
      auto img = F.apply(Code::pair(watched, Code(v)));
      if (!img) continue;  // beyond the computable horizon of an omega block
      if (img->parts()[0].leaf() >= watched + 1) {
        inX = true;
        break;
      }
    }
    if (inX) report.spillSet.push_back(x);

    PositionRecovery pr;
    pr.x = x;
    bool bounded = false;
    for (uint64_t u = 0; u <= i && !bounded; ++u) {
      bool all = true;
      for (uint64_t v = 0; v <= inst.vBound(); ++v)
        if (!inst.phi(x, u, v)) {
          all = false;
          break;
        }
      if (all) {
        bounded = true;
        pr.minU = u;
      }
    }
    pr.psi = inX || bounded;
    pr.via = inX ? "spill" : (bounded ? "boundedWitness" : "none");

    PsiValue truth = bruteForcePsi(inst, x);
    if (truth.holds != pr.psi)
      throw DomainError("recovery equivalence failed at position " + std::to_string(x) +
                        ": recovered " + (pr.psi ? "true" : "false") + ", brute force says " +
                        (truth.holds ? "true" : "false"));
    if (inX && !truth.holds)
      throw DomainError("spill soundness failed at position " + std::to_string(x));
    report.perPosition.push_back(std::move(pr));
  }
  return report;
}

void positionalInvariantCheck(const Sigma2Instance& inst, uint64_t i, uint64_t j,
                              const EmbeddingWitness& F, bool primed) {
  BlockFamily src = primed ? buildFamilyPrimed(inst, i) : buildFamily(inst, i);
  BlockFamily tgt = primed ? buildFamilyPrimed(inst, j) : buildFamily(inst, j);
  auto tgtPres = familyPresentation(tgt);
  for (uint64_t y = 0; y < src.blocks.size(); ++y) {
    Code head = Code::pair(y, Code(0));
    auto img = F.apply(head);
    if (!img) throw IncompleteWitnessError("family map undefined at a head");
    if (tgtPres->compare(*img, head) == Ordering::Less)
      throw DomainError("positional invariant failed: F(" + head.repr() + ") = " + img->repr() +
                        " sits below its summand head");
    if (y % 2 == 1 && y + 1 < src.blocks.size()) {
      Code nextHead = Code::pair(y + 1, Code(0));
      for (uint64_t k = 0; k <= kSeparatorSample; ++k) {
        Code pt = Code::pair(y, Code(k));
        auto sep = F.apply(pt);
        if (!sep) throw IncompleteWitnessError("family map undefined on a separator");
        if (tgtPres->compare(*sep, nextHead) != Ordering::Less)
          throw DomainError("positional invariant failed: F(" + pt.repr() + ") = " +
                            sep->repr() + " reaches past the next head");
      }
    }
  }
}

}  // namespace ordlab
