#include "ordlab/embedding.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "ordlab/errors.hpp"
#include "ordlab/rational_coding.hpp"

namespace ordlab {

// --- witness basics ------------------------------------------------------------

EmbeddingWitness EmbeddingWitness::finiteMap(std::vector<std::pair<Code, Code>> pairs) {
  EmbeddingWitness w;
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  w.name_ = "finiteMap";
  w.finite_ = std::make_shared<const std::vector<std::pair<Code, Code>>>(std::move(pairs));
  return w;
}

EmbeddingWitness EmbeddingWitness::rule(std::string name, nlohmann::ordered_json params,
                                        ApplyFn fn) {
  EmbeddingWitness w;
  w.name_ = std::move(name);
  w.params_ = std::move(params);
  w.fn_ = std::move(fn);
  return w;
}

std::optional<Code> EmbeddingWitness::apply(const Code& c) const {
  if (finite_) {
    auto it = std::lower_bound(finite_->begin(), finite_->end(), c,
                               [](const auto& p, const Code& key) { return p.first < key; });
    if (it != finite_->end() && it->first == c) return it->second;
    return std::nullopt;
  }
  return fn_(c);
}

nlohmann::ordered_json EmbeddingWitness::toJson() const {
  nlohmann::ordered_json j;
  if (finite_) {
    j["kind"] = "finiteMap";
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& [a, b] : *finite_) pairs.push_back({a.toJson(), b.toJson()});
    j["pairs"] = std::move(pairs);
  } else {
    j["kind"] = "rule";
    j["name"] = name_;
    if (!params_.is_null()) j["params"] = params_;
  }
  if (claimedBound) j["claimedBound"] = claimedBound->toJson();
  if (domainTerm) j["domainTerm"] = domainTerm->show();
  return j;
}

EmbeddingWitness composeWitness(std::string name, EmbeddingWitness first,
                                EmbeddingWitness second) {
  nlohmann::ordered_json params;
  params["first"] = first.toJson();
  params["second"] = second.toJson();
  auto f1 = std::make_shared<EmbeddingWitness>(std::move(first));
  auto f2 = std::make_shared<EmbeddingWitness>(std::move(second));
  EmbeddingWitness w = EmbeddingWitness::rule(
      std::move(name), std::move(params), [f1, f2](const Code& c) -> std::optional<Code> {
        auto mid = f1->apply(c);
        if (!mid) return std::nullopt;
        return f2->apply(*mid);
      });
  w.claimedBound = f2->claimedBound;
  return w;
}

// --- verification ----------------------------------------------------------------

VerifyResult verifyEmbedding(const EmbeddingWitness& w, const Presentation& dom,
                             const Presentation& cod, uint64_t sampleSize) {
  std::vector<Code> pts, imgs;
  for (uint64_t i = 0; i < sampleSize; ++i) {
    auto c = dom.enumerate(i);
    if (!c) break;
    auto img = w.apply(*c);
    if (!img) throw IncompleteWitnessError("witness undefined at sampled point " + c->repr());
    if (!cod.contains(*img)) {
      VerifyResult r;
      r.invalidImage = *img;
      return r;
    }
    pts.push_back(std::move(*c));
    imgs.push_back(std::move(*img));
  }
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      Ordering d = dom.compare(pts[i], pts[j]);
      Ordering c = cod.compare(imgs[i], imgs[j]);
      if (d != c) {
        VerifyResult r;
        bool iLess = d == Ordering::Less;
        r.violation = std::make_pair(pts[iLess ? i : j], pts[iLess ? j : i]);
        return r;
      }
    }
  }
  VerifyResult r;
  r.verified = true;
  return r;
}

std::vector<Code> extractDescending(const EmbeddingWitness& w, const Presentation& p,
                                    const Code& start, uint64_t steps) {
  if (!p.contains(start)) throw DomainError("orbit start is not a point of the order");
  std::vector<Code> orbit{start};
  Code cur = start;
  for (uint64_t s = 1; s < steps; ++s) {
    auto nxt = w.apply(cur);
    if (!nxt) throw IncompleteWitnessError("witness undefined along the orbit at " + cur.repr());
    if (!p.contains(*nxt)) throw DomainError("witness invalid: orbit left the order");
    if (p.compare(*nxt, cur) != Ordering::Less)
      throw DomainError("witness invalid: orbit is not strictly descending at " + cur.repr());
    cur = *nxt;
    orbit.push_back(cur);
  }
  return orbit;
}

// --- canonical chains -------------------------------------------------------------

namespace {

std::vector<Code> canonicalAscent(const OrderTerm& t, size_t length);

// fixed-length rational codes so indices stay within 64 bits regardless of
// the chain length
Code rationalChainCode(uint64_t k, bool ascending) {
  constexpr uint64_t kLen = 40;
  constexpr uint64_t kMid = uint64_t{1} << 39;
  uint64_t val = ascending ? kMid + k : kMid - k;
  return Code(((uint64_t{1} << kLen) - 1) + val);
}

std::vector<Code> wrapAll(uint64_t tag, std::vector<Code> v) {
  for (auto& c : v) c = Code::pair(tag, std::move(c));
  return v;
}

}  // namespace

std::vector<Code> canonicalDescent(const OrderTerm& t, size_t length) {
  switch (t.kind()) {
    case OrderTerm::Kind::Rev: return canonicalAscent(t.child(), length);
    case OrderTerm::Kind::Rationals: {
      std::vector<Code> out;
      for (size_t k = 0; k < length; ++k) out.push_back(rationalChainCode(k, false));
      return out;
    }
    case OrderTerm::Kind::Sum: {
      if (!classify(t.right()).isWellOrder)
        return wrapAll(1, canonicalDescent(t.right(), length));
      if (!classify(t.left()).isWellOrder)
        return wrapAll(0, canonicalDescent(t.left(), length));
      break;
    }
    case OrderTerm::Kind::OmegaExp: {
      std::vector<Code> inner = canonicalDescent(t.child(), length);
      for (auto& c : inner) c = Code::tuple({std::move(c)});
      return inner;
    }
    default: break;
  }
  throw DomainError("no descending sequence exists in " + t.show());
}

namespace {

std::vector<Code> canonicalAscent(const OrderTerm& t, size_t length) {
  switch (t.kind()) {
    case OrderTerm::Kind::Omega: {
      std::vector<Code> out;
      for (size_t k = 0; k < length; ++k) out.push_back(Code(k));
      return out;
    }
    case OrderTerm::Kind::Rationals: {
      std::vector<Code> out;
      for (size_t k = 0; k < length; ++k) out.push_back(rationalChainCode(k, true));
      return out;
    }
    case OrderTerm::Kind::Rev: return canonicalDescent(t.child(), length);
    case OrderTerm::Kind::Sum: {
      if (!orderSize(t.right()).has_value()) return wrapAll(1, canonicalAscent(t.right(), length));
      if (!orderSize(t.left()).has_value()) return wrapAll(0, canonicalAscent(t.left(), length));
      break;
    }
    case OrderTerm::Kind::OmegaExp: {
      if (orderIsEmpty(t.child())) break;
      auto least = denote(t.child())->enumerate(0);
      std::vector<Code> out;
      for (size_t k = 0; k < length; ++k)
        out.push_back(Code::tuple(std::vector<Code>(k, *least)));
      return out;
    }
    default: break;
  }
  throw DomainError("no ascending sequence exists in " + t.show());
}

}  // namespace

// --- named constructions -----------------------------------------------------------

EmbeddingWitness omegaStarShift() {
  EmbeddingWitness w = EmbeddingWitness::rule(
      "omegaStarShift", {}, [](const Code& c) -> std::optional<Code> {
        if (!c.isLeaf()) return std::nullopt;
        return Code(c.leaf() + 1);
      });
  w.claimedBound = Code(0);
  w.domainTerm = OrderTerm::rev(OrderTerm::omega());
  return w;
}

EmbeddingWitness selfEmbedIllFounded(const OrderTerm& t, const std::vector<Code>& descent) {
  if (descent.size() < 2) throw DomainError("descent must have at least two points");
  auto p = denote(t);
  for (const auto& c : descent)
    if (!p->contains(c)) throw DomainError("descent point is not in the order: " + c.repr());
  for (size_t i = 0; i + 1 < descent.size(); ++i)
    if (p->compare(descent[i + 1], descent[i]) != Ordering::Less)
      throw DomainError("descent is not strictly descending");

  auto table = std::make_shared<const std::vector<Code>>(descent);
  nlohmann::ordered_json params;
  params["target"] = t.show();
  params["descentLength"] = descent.size();
  EmbeddingWitness w = EmbeddingWitness::rule(
      "expSubstitution", std::move(params), [table](const Code& c) -> std::optional<Code> {
        if (c.isLeaf()) return std::nullopt;
        std::vector<Code> out;
        out.reserve(c.parts().size());
        for (const auto& e : c.parts()) {
          if (!e.isLeaf()) return std::nullopt;
          uint64_t idx = e.leaf() + 1;
          if (idx >= table->size()) return std::nullopt;
          out.push_back((*table)[idx]);
        }
        return Code::tuple(std::move(out));
      });
  w.claimedBound = Code::tuple({descent[0]});
  w.domainTerm = OrderTerm::omegaExp(OrderTerm::rev(OrderTerm::omega()));
  return w;
}

// --- dense navigation ---------------------------------------------------------------

namespace {

struct DenseNavigator {
  std::function<Code()> first;
  std::function<Code(const Code&)> below;
  std::function<Code(const Code&)> above;
  std::function<Code(const Code&, const Code&)> between;  // a < b
};

// Y = W(rev(w)) without its least point: the explicit no-endpoint and density
// witnesses of the sequence order over reversed naturals.
DenseNavigator navigatorY() {
  DenseNavigator nav;
  nav.first = [] { return Code::tuple({Code(0)}); };
  nav.below = [](const Code& s) {
    return Code::tuple({Code(s.parts()[0].leaf() + 1)});
  };
  nav.above = [](const Code& s) {
    std::vector<Code> v = s.parts();
    v.push_back(v.back());
    return Code::tuple(std::move(v));
  };
  nav.between = [](const Code& a, const Code& b) {
    const auto& pa = a.parts();
    const auto& pb = b.parts();
    bool prefix = pa.size() < pb.size();
    for (size_t i = 0; prefix && i < pa.size(); ++i)
      if (pa[i] != pb[i]) prefix = false;
    std::vector<Code> v = pa;
    if (prefix)
      v.push_back(Code(pb[pa.size()].leaf() + 1));
    else
      v.push_back(pa.back());
    return Code::tuple(std::move(v));
  };
  return nav;
}

std::string dyadicStringOf(const Code& c) { return rationalStringOfIndex(c.leaf()); }

Code dyadicCodeOf(const std::string& s) {
  if (s.size() > 62) throw OutOfRangeError("rational coding depth exceeded");
  return Code(rationalIndexOfString(s));
}

int compareDyadicStrings(const std::string& a, const std::string& b) {
  // compare binary expansions 0.a1 vs 0.b1 bitwise
  auto bit = [](const std::string& s, size_t i) -> int {
    if (i < s.size()) return s[i] - '0';
    return i == s.size() ? 1 : 0;
  };
  size_t n = std::max(a.size(), b.size()) + 1;
  for (size_t i = 0; i < n; ++i) {
    int d = bit(a, i) - bit(b, i);
    if (d != 0) return d;
  }
  return 0;
}

DenseNavigator navigatorDyadic() {
  DenseNavigator nav;
  nav.first = [] { return Code(0); };
  nav.below = [](const Code& s) { return dyadicCodeOf(dyadicStringOf(s) + "0"); };
  nav.above = [](const Code& s) { return dyadicCodeOf(dyadicStringOf(s) + "1"); };
  nav.between = [](const Code& a, const Code& b) {
    std::string sa = dyadicStringOf(a), sb = dyadicStringOf(b);
    std::string cur;
    for (int guard = 0; guard < 256; ++guard) {
      if (compareDyadicStrings(cur, sa) <= 0)
        cur += '1';
      else if (compareDyadicStrings(cur, sb) >= 0)
        cur += '0';
      else
        return dyadicCodeOf(cur);
    }
    throw InternalError("dyadic bisection failed to terminate");
  };
  return nav;
}

// One-sided deterministic back-and-forth along the domain enumeration.
EmbeddingWitness backAndForth(std::string name, const Presentation::Ptr& dom,
                              DenseNavigator nav, uint64_t indexCap) {
  struct State {
    std::mutex mu;
    std::map<Code, Code> images;
    std::vector<Code> sortedPts;   // ascending in dom order
    std::vector<Code> sortedImgs;  // parallel
    uint64_t processed = 0;
  };
  auto st = std::make_shared<State>();
  nlohmann::ordered_json params;
  params["source"] = dom->describe();
  return EmbeddingWitness::rule(
      std::move(name), std::move(params),
      [st, dom, nav, indexCap](const Code& c) -> std::optional<Code> {
        std::lock_guard<std::mutex> lock(st->mu);
        auto hit = st->images.find(c);
        if (hit != st->images.end()) return hit->second;
        while (st->processed < indexCap) {
          auto pt = dom->enumerate(st->processed);
          if (!pt) return std::nullopt;
          ++st->processed;
          auto pos = std::lower_bound(
              st->sortedPts.begin(), st->sortedPts.end(), *pt,
              [&](const Code& x, const Code& key) {
                return dom->compare(x, key) == Ordering::Less;
              });
          size_t idx = static_cast<size_t>(pos - st->sortedPts.begin());
          Code img = st->sortedPts.empty()
                         ? nav.first()
                         : (idx == 0 ? nav.below(st->sortedImgs.front())
                                     : (idx == st->sortedPts.size()
                                            ? nav.above(st->sortedImgs.back())
                                            : nav.between(st->sortedImgs[idx - 1],
                                                          st->sortedImgs[idx])));
          st->sortedPts.insert(pos, *pt);
          st->sortedImgs.insert(st->sortedImgs.begin() + static_cast<long>(idx), img);
          st->images.emplace(*pt, img);
          if (*pt == c) return img;
        }
        return std::nullopt;
      });
}

}  // namespace

EmbeddingWitness denseEmbed(const Presentation::Ptr& p) {
  return backAndForth("denseEmbed", p, navigatorY(), 300000);
}

// --- dense-channel self-embeddings ----------------------------------------------------

namespace {

enum class ChannelKind { Rationals, ExpIll };

struct DenseChannel {
  std::vector<uint64_t> path;  // 0 = Sum left, 1 = Sum right, 2 = Rev
  bool flipped = false;        // odd number of Rev steps on the path
  ChannelKind kind = ChannelKind::Rationals;
  OrderTerm channelTerm = OrderTerm::rationals();
};

std::optional<DenseChannel> findDenseChannel(const OrderTerm& t, std::vector<uint64_t> path,
                                             bool flipped) {
  if (t.kind() == OrderTerm::Kind::Rationals)
    return DenseChannel{std::move(path), flipped, ChannelKind::Rationals, t};
  if (t.kind() == OrderTerm::Kind::OmegaExp && !classify(t.child()).isWellOrder)
    return DenseChannel{std::move(path), flipped, ChannelKind::ExpIll, t};
  if (t.kind() == OrderTerm::Kind::Rev) {
    path.push_back(2);
    return findDenseChannel(t.child(), std::move(path), !flipped);
  }
  if (t.kind() == OrderTerm::Kind::Sum) {
    auto lpath = path;
    lpath.push_back(0);
    if (auto l = findDenseChannel(t.left(), std::move(lpath), flipped)) return l;
    path.push_back(1);
    return findDenseChannel(t.right(), std::move(path), flipped);
  }
  return std::nullopt;
}

Code wrapThroughPath(const std::vector<uint64_t>& path, Code inner) {
  for (size_t k = path.size(); k-- > 0;) {
    if (path[k] == 2) continue;  // Rev keeps codes unchanged
    inner = Code::pair(path[k], std::move(inner));
  }
  return inner;
}

Code flipDyadic(const Code& c) {
  std::string s = dyadicStringOf(c);
  for (char& b : s) b = b == '0' ? '1' : '0';
  return dyadicCodeOf(s);
}

// Embedding of the rational coding into denote(t) through a dense channel.
EmbeddingWitness channelInjection(const OrderTerm& t, const DenseChannel& ch) {
  if (ch.kind == ChannelKind::Rationals) {
    auto path = ch.path;
    bool flipped = ch.flipped;
    nlohmann::ordered_json params;
    params["target"] = t.show();
    return EmbeddingWitness::rule("rationalsInjection", std::move(params),
                                  [path, flipped](const Code& c) -> std::optional<Code> {
                                    Code inner = flipped ? flipDyadic(c) : c;
                                    return wrapThroughPath(path, std::move(inner));
                                  });
  }
  // route the rationals through the dense suborder of an exponential over an
  // ill-founded exponent: dense embed into Y, then substitute along a descent
  OrderTerm expTerm = ch.channelTerm;
  std::vector<Code> descent = canonicalDescent(expTerm.child(), 360);
  EmbeddingWitness toY = denseEmbed(denote(OrderTerm::rationals()));
  EmbeddingWitness subst = selfEmbedIllFounded(expTerm.child(), descent);
  auto path = ch.path;
  bool flipped = ch.flipped;
  auto g1 = std::make_shared<EmbeddingWitness>(std::move(toY));
  auto g2 = std::make_shared<EmbeddingWitness>(std::move(subst));
  nlohmann::ordered_json params;
  params["target"] = t.show();
  params["channel"] = expTerm.show();
  return EmbeddingWitness::rule("denseChannelInjection", std::move(params),
                                [path, flipped, g1, g2](const Code& c) -> std::optional<Code> {
                                  Code inner = flipped ? flipDyadic(c) : c;
                                  auto y = g1->apply(inner);
                                  if (!y) return std::nullopt;
                                  auto img = g2->apply(*y);
                                  if (!img) return std::nullopt;
                                  return wrapThroughPath(path, std::move(*img));
                                });
}

}  // namespace

EmbeddingWitness selfEmbedNonScattered(const OrderTerm& t) {
  if (classify(t).isScattered)
    throw DomainError("self-embedding through a dense channel needs a non-scattered term: " +
                      t.show());
  auto channel = findDenseChannel(t, {}, false);
  if (!channel) throw InternalError("non-scattered term without a dense channel");

  auto dom = denote(t);
  auto intoQ = std::make_shared<EmbeddingWitness>(
      backAndForth("intoRationals", dom, navigatorDyadic(), 300000));
  auto inject = std::make_shared<EmbeddingWitness>(channelInjection(t, *channel));

  // pivot rational and the shift below it
  Code q0(0);
  auto pivotImage = inject->apply(q0);
  if (!pivotImage) throw InternalError("channel injection undefined at the pivot");

  nlohmann::ordered_json params;
  params["term"] = t.show();
  params["pivot"] = pivotImage->toJson();
  EmbeddingWitness w = EmbeddingWitness::rule(
      "denseSelfEmbed", std::move(params), [intoQ, inject](const Code& c) -> std::optional<Code> {
        auto q = intoQ->apply(c);
        if (!q) return std::nullopt;
        Code shifted = dyadicCodeOf("0" + dyadicStringOf(*q));
        return inject->apply(shifted);
      });
  w.claimedBound = *pivotImage;
  w.domainTerm = t;

  VerifyResult vr = verifyEmbedding(w, *dom, *dom, 24);
  if (!vr.verified) throw InternalError("dense self-embedding failed verification");
  for (uint64_t i = 0; i < 24; ++i) {
    auto c = dom->enumerate(i);
    if (!c) break;
    auto img = w.apply(*c);
    if (!img || dom->compare(*img, *w.claimedBound) != Ordering::Less)
      throw InternalError("dense self-embedding escaped its claimed bound");
  }
  return w;
}

EmbeddingWitness selfEmbedScattered(const OrderTerm& t) {
  OrderClass cls = classify(t);
  if (cls.isWellOrder) throw DomainError("well orders admit no segment self-embedding");
  if (!cls.isScattered) throw DomainError("term is not scattered: " + t.show());

  switch (t.kind()) {
    case OrderTerm::Kind::Sum: {
      bool leftIll = !classify(t.left()).isWellOrder;
      uint64_t tag = leftIll ? 0 : 1;
      EmbeddingWitness inner = selfEmbedScattered(leftIll ? t.left() : t.right());
      auto innerPtr = std::make_shared<EmbeddingWitness>(std::move(inner));
      nlohmann::ordered_json params;
      params["term"] = t.show();
      params["side"] = tag;
      EmbeddingWitness w = EmbeddingWitness::rule(
          "sumLift", std::move(params), [tag, innerPtr](const Code& c) -> std::optional<Code> {
            if (c.isLeaf() || c.parts().size() != 2) return std::nullopt;
            uint64_t side = c.parts()[0].leaf();
            if (side < tag) return c;           // identity left of the active part
            if (side > tag) return std::nullopt;  // outside the mapped initial segment
            auto img = innerPtr->apply(c.parts()[1]);
            if (!img) return std::nullopt;
            return Code::pair(tag, std::move(*img));
          });
      if (!innerPtr->claimedBound) throw InternalError("inner witness without a bound");
      w.claimedBound = Code::pair(tag, *innerPtr->claimedBound);
      w.domainTerm = t;
      return w;
    }
    case OrderTerm::Kind::Rev: {
      OrderTerm u = t.child();
      if (classify(u).isWellOrder) {
        // u is an infinite well order: shift every position up by one, which
        // lands strictly below the least point of u in the reversed order
        auto up = denote(u);
        auto x0 = up->pointAtPosition(Ord());
        if (!x0) throw InternalError("infinite well order without a least point");
        nlohmann::ordered_json params;
        params["term"] = t.show();
        EmbeddingWitness w = EmbeddingWitness::rule(
            "reversedPositionShift", std::move(params),
            [up](const Code& c) -> std::optional<Code> {
              auto pos = up->positionOf(c);
              if (!pos) return std::nullopt;
              return up->pointAtPosition(Ord::finite(1) + *pos);
            });
        w.claimedBound = *x0;
        w.domainTerm = t;
        return w;
      }
      if (u.kind() == OrderTerm::Kind::Rev) {
        EmbeddingWitness w = selfEmbedScattered(u.child());  // identical codes and order
        w.domainTerm = t;
        return w;
      }
      if (u.kind() == OrderTerm::Kind::Sum) {
        // rev(a + b) is rev(b) followed by rev(a); recurse into the part that
        // carries the ill-foundedness, identity below it
        OrderTerm low = OrderTerm::rev(u.right());
        OrderTerm high = OrderTerm::rev(u.left());
        bool lowIll = !classify(low).isWellOrder;
        uint64_t tag = lowIll ? 1 : 0;  // codes keep the Sum tags: tag 1 is low
        EmbeddingWitness inner = selfEmbedScattered(lowIll ? low : high);
        auto innerPtr = std::make_shared<EmbeddingWitness>(std::move(inner));
        nlohmann::ordered_json params;
        params["term"] = t.show();
        params["side"] = tag;
        EmbeddingWitness w = EmbeddingWitness::rule(
            "reversedSumLift", std::move(params),
            [tag, innerPtr](const Code& c) -> std::optional<Code> {
              if (c.isLeaf() || c.parts().size() != 2) return std::nullopt;
              uint64_t side = c.parts()[0].leaf();
              if (side > tag) return c;  // tag 1 region lies below tag 0 here
              if (side < tag) return std::nullopt;
              auto img = innerPtr->apply(c.parts()[1]);
              if (!img) return std::nullopt;
              return Code::pair(tag, std::move(*img));
            });
        if (!innerPtr->claimedBound) throw InternalError("inner witness without a bound");
        w.claimedBound = Code::pair(tag, *innerPtr->claimedBound);
        w.domainTerm = t;
        return w;
      }
      throw InternalError("unexpected reversed shape: " + t.show());
    }
    default:
      throw InternalError("unexpected scattered ill-founded shape: " + t.show());
  }
}

EmbeddingWitness selfEmbedAny(const OrderTerm& t) {
  OrderClass cls = classify(t);
  if (cls.isWellOrder)
    throw DomainError("well orders admit no segment self-embedding: " + t.show());
  return cls.isScattered ? selfEmbedScattered(t) : selfEmbedNonScattered(t);
}

EmbeddingWitness omegaExpSelfEmbed(const OrderTerm& t, size_t descentLength) {
  std::vector<Code> descent = canonicalDescent(t, descentLength);
  EmbeddingWitness subst = selfEmbedIllFounded(t, descent);
  EmbeddingWitness dense = denseEmbed(denote(OrderTerm::omegaExp(t)));
  Code bound = Code::tuple({descent[0]});
  EmbeddingWitness w = composeWitness("omegaExpSelfEmbed", std::move(dense), std::move(subst));
  w.claimedBound = bound;
  w.domainTerm = OrderTerm::omegaExp(t);
  return w;
}

// --- interval lifting ---------------------------------------------------------------

namespace {

bool findSumPath(const OrderTerm& outer, const OrderTerm& target, std::vector<uint64_t>& path) {
  if (outer == target) return true;
  if (outer.kind() != OrderTerm::Kind::Sum) return false;
  path.push_back(0);
  if (findSumPath(outer.left(), target, path)) return true;
  path.back() = 1;
  if (findSumPath(outer.right(), target, path)) return true;
  path.pop_back();
  return false;
}

// region classification along a Sum path: Before (identity part), Inside,
// After (outside the lifted domain)
enum class Region { Before, Inside, After };

Region regionOf(const std::vector<uint64_t>& path, const Code& c, Code* inner) {
  Code cur = c;
  for (uint64_t step : path) {
    if (cur.isLeaf() || cur.parts().size() != 2) return Region::After;
    uint64_t tag = cur.parts()[0].leaf();
    if (tag < step) return Region::Before;
    if (tag > step) return Region::After;
    cur = cur.parts()[1];
  }
  if (inner) *inner = cur;
  return Region::Inside;
}

class RegionPresentation : public Presentation {
 public:
  RegionPresentation(Presentation::Ptr parent, OrderTerm outer, std::vector<uint64_t> path)
      : parent_(std::move(parent)), outer_(std::move(outer)), path_(std::move(path)) {}

  bool contains(const Code& c) const override {
    return parent_->contains(c) && regionOf(path_, c, nullptr) != Region::After;
  }
  Ordering compare(const Code& a, const Code& b) const override { return parent_->compare(a, b); }
  std::optional<Code> enumerate(uint64_t index) const override {
    std::lock_guard<std::mutex> lock(mu_);
    while (cache_.size() <= index) {
      auto c = parent_->enumerate(next_++);
      if (!c) return std::nullopt;
      if (regionOf(path_, *c, nullptr) != Region::After) cache_.push_back(std::move(*c));
    }
    return cache_[index];
  }
  std::optional<uint64_t> size() const override { return regionSize(outer_, 0); }
  bool intervalFinite(const Code& a, const Code& b) const override {
    return parent_->intervalFinite(a, b);
  }
  bool belowFinite(const Code& b) const override { return parent_->belowFinite(b); }
  bool aboveFinite(const Code& a) const override { return regionAboveFinite(outer_, 0, a); }
  std::string describe() const override {
    return "initial region of " + outer_.show();
  }

 private:
  std::optional<uint64_t> regionSize(const OrderTerm& t, size_t depth) const {
    if (depth == path_.size()) return orderSize(t);
    if (path_[depth] == 0) return regionSize(t.left(), depth + 1);
    auto l = orderSize(t.left());
    auto r = regionSize(t.right(), depth + 1);
    if (l && r) return *l + *r;
    return std::nullopt;
  }

  bool regionAboveFinite(const OrderTerm& t, size_t depth, const Code& c) const {
    if (depth == path_.size()) return denote(t)->aboveFinite(c);
    uint64_t step = path_[depth];
    uint64_t tag = c.parts()[0].leaf();
    const Code& inner = c.parts()[1];
    if (step == 0) return regionAboveFinite(t.left(), depth + 1, inner);
    if (tag == 1) return regionAboveFinite(t.right(), depth + 1, inner);
    auto rsz = regionSize(t.right(), depth + 1);
    return denote(t.left())->aboveFinite(inner) && rsz.has_value();
  }

  Presentation::Ptr parent_;
  OrderTerm outer_;
  std::vector<uint64_t> path_;
  mutable std::mutex mu_;
  mutable std::vector<Code> cache_;
  mutable uint64_t next_ = 0;
};

std::vector<uint64_t> liftPathFor(const OrderTerm& outer, const EmbeddingWitness& w) {
  if (!w.domainTerm)
    throw DomainError("interval lift needs a witness that names its domain term");
  std::vector<uint64_t> path;
  if (!findSumPath(outer, *w.domainTerm, path))
    throw DomainError("designated interval " + w.domainTerm->show() +
                      " is not a summand interval of " + outer.show());
  return path;
}

}  // namespace

EmbeddingWitness intervalLift(const OrderTerm& outer, const EmbeddingWitness& w) {
  std::vector<uint64_t> path = liftPathFor(outer, w);
  auto innerPtr = std::make_shared<EmbeddingWitness>(w);
  auto pathPtr = std::make_shared<const std::vector<uint64_t>>(path);
  nlohmann::ordered_json params;
  params["outer"] = outer.show();
  params["interval"] = w.domainTerm->show();
  params["inner"] = w.toJson();
  EmbeddingWitness lifted = EmbeddingWitness::rule(
      "intervalLift", std::move(params), [innerPtr, pathPtr](const Code& c) -> std::optional<Code> {
        Code inner;
        switch (regionOf(*pathPtr, c, &inner)) {
          case Region::Before: return c;
          case Region::After: return std::nullopt;
          case Region::Inside: {
            auto img = innerPtr->apply(inner);
            if (!img) return std::nullopt;
            return wrapThroughPath(*pathPtr, std::move(*img));
          }
        }
        return std::nullopt;
      });
  if (w.claimedBound) lifted.claimedBound = wrapThroughPath(path, *w.claimedBound);
  lifted.domainTerm = outer;
  return lifted;
}

Presentation::Ptr intervalLiftDomain(const OrderTerm& outer, const EmbeddingWitness& w) {
  return std::make_shared<RegionPresentation>(denote(outer), outer, liftPathFor(outer, w));
}

// --- refutation ---------------------------------------------------------------------

namespace {

struct RefuteContext {
  const EmbeddingWitness* f;
  Presentation::Ptr expParent;  // denote(W(base))
  uint64_t budget;
  RefutationTrace trace;

  bool spend() {
    if (budget == 0) return false;
    --budget;
    ++trace.queriesUsed;
    return true;
  }
};

std::vector<Code> stripPrefix(const std::vector<Code>& prefix, const Code& point) {
  const auto& parts = point.parts();
  if (parts.size() < prefix.size()) throw InternalError("image does not extend the block prefix");
  for (size_t i = 0; i < prefix.size(); ++i)
    if (!(parts[i] == prefix[i])) throw InternalError("image does not extend the block prefix");
  return std::vector<Code>(parts.begin() + static_cast<long>(prefix.size()), parts.end());
}

}  // namespace

RefutationTrace refuteExponentDrop(const EmbeddingWitness& f, const OrderTerm& base,
                                   const Code& x, const Code& y, uint64_t n, uint64_t budget) {
  auto bp = denote(base);
  if (!classify(base).isWellOrder) throw DomainError("exponent base must be a well-order term");
  if (!bp->contains(x) || !bp->contains(y)) throw DomainError("invalid exponent code");
  if (bp->compare(x, y) != Ordering::Greater)
    throw DomainError("exponent drop needs x > y in the base");
  if (n == 0) throw DomainError("empty codomain");

  RefuteContext ctx{&f, denote(OrderTerm::omegaExp(base)), budget, {}};
  auto minPt = bp->pointAtPosition(Ord());
  bool hasMin = minPt.has_value();
  Code minCode = hasMin ? *minPt : Code(0);

  CnfSeq eta(base, {});
  CnfSeq xi(base, {});
  Code yCur = y;
  uint64_t window = n;  // the current frame holds `window` blocks of omega^yCur

  auto finishViolation = [&](const Code& a, const Code& b) {
    bool atFloor = hasMin && yCur == minCode;
    ctx.trace.terminal = atFloor ? RefutationTrace::Terminal::ExponentOverflow
                                 : RefutationTrace::Terminal::OrderViolation;
    ctx.trace.violationPair = std::make_pair(a, b);
    return ctx.trace;
  };

  while (true) {
    Code upperBound = cnfAdd(eta, omegaPowerTimes(base, yCur, window)).asPoint();
    std::vector<Code> probePts;
    std::vector<Code> probeImgs;
    for (uint64_t k = 0; k <= window; ++k) {
      CnfSeq probe = cnfAdd(xi, omegaPowerTimes(base, yCur, k));
      Code pt = probe.asPoint();
      if (!ctx.spend()) {
        ctx.trace.terminal = RefutationTrace::Terminal::BudgetExceeded;
        return ctx.trace;
      }
      auto img = ctx.f->apply(pt);
      if (!img) throw IncompleteWitnessError("witness undefined at probe " + pt.repr());
      if (!ctx.expParent->contains(*img) ||
          ctx.expParent->compare(*img, upperBound) != Ordering::Less) {
        ctx.trace.terminal = RefutationTrace::Terminal::CodomainEscape;
        ctx.trace.escapePoint = pt;
        return ctx.trace;
      }
      if (ctx.expParent->compare(eta.asPoint(), *img) == Ordering::Greater)
        return finishViolation(xi.asPoint(), pt);
      if (!probeImgs.empty() &&
          ctx.expParent->compare(probeImgs.back(), *img) != Ordering::Less)
        return finishViolation(probePts.back(), pt);
      probePts.push_back(pt);
      probeImgs.push_back(std::move(*img));
    }

    // block index of each image inside the current frame
    std::vector<uint64_t> blockIdx(probeImgs.size());
    for (size_t k = 0; k < probeImgs.size(); ++k) {
      std::vector<Code> rest = stripPrefix(eta.entries(), probeImgs[k]);
      uint64_t lead = 0;
      while (lead < rest.size() && rest[lead] == yCur) ++lead;
      blockIdx[k] = lead;
    }
    std::optional<uint64_t> rep;
    for (size_t k = 0; k + 1 < blockIdx.size(); ++k)
      if (blockIdx[k] == blockIdx[k + 1]) {
        rep = k;
        break;
      }
    if (!rep) throw InternalError("pigeonhole search found no repeated block");

    uint64_t kRep = *rep;
    uint64_t m = blockIdx[kRep];
    ctx.trace.steps.push_back(RefutationStep{yCur, kRep, m});

    CnfSeq newEta = cnfAdd(eta, omegaPowerTimes(base, yCur, m));
    CnfSeq newXi = cnfAdd(xi, omegaPowerTimes(base, yCur, kRep));
    std::vector<Code> rest = stripPrefix(newEta.entries(), probeImgs[kRep + 1]);
    if (rest.empty()) throw InternalError("strictly larger image collapsed onto the block base");
    Code yNext = rest[0];
    if (bp->compare(yNext, yCur) != Ordering::Less)
      throw InternalError("exponent failed to descend");
    uint64_t lead = 0;
    while (lead < rest.size() && rest[lead] == yNext) ++lead;

    eta = newEta;
    xi = newXi;
    yCur = yNext;
    window = lead + 1;
  }
}

SegmentCheckResult checkNoSegmentSelfEmbedding(const CnfSeq& sigma, const EmbeddingWitness& f,
                                               uint64_t budget) {
  SegmentCheckResult out;
  if (sigma.length() == 0) {
    out.kind = SegmentCheckResult::Kind::Vacuous;
    return out;
  }
  auto seg = segmentOf(sigma);
  if (!f.claimedBound || !seg->contains(*f.claimedBound))
    throw DomainError("witness must claim a proper initial segment bound below the sequence");

  const OrderTerm& base = sigma.base();
  auto parent = denote(OrderTerm::omegaExp(base));
  Code boundPt = *f.claimedBound;
  std::vector<Code> tau = boundPt.parts();

  auto query = [&](const Code& pt) -> Code {
    if (budget == 0) throw BudgetError("segment check ran out of budget");
    --budget;
    auto img = f.apply(pt);
    if (!img) throw IncompleteWitnessError("witness undefined at " + pt.repr());
    return *img;
  };

  // the claim itself: the bound point must map strictly below the bound
  Code imgBound = query(boundPt);
  if (!seg->contains(imgBound) || parent->compare(imgBound, boundPt) != Ordering::Less) {
    out.kind = SegmentCheckResult::Kind::Violation;
    out.violation = std::make_pair(boundPt, imgBound);
    return out;
  }

  Code prevPt = Code::tuple({});
  Code prevImg = query(prevPt);
  if (!seg->contains(prevImg)) {
    out.kind = SegmentCheckResult::Kind::Violation;
    out.violation = std::make_pair(prevPt, prevImg);
    return out;
  }

  for (size_t j = 0; j < tau.size(); ++j) {
    std::vector<Code> prefix(tau.begin(), tau.begin() + static_cast<long>(j));
    Code nextPt = Code::tuple(std::vector<Code>(tau.begin(), tau.begin() + static_cast<long>(j + 1)));
    Code nextImg = j + 1 == tau.size() ? imgBound : query(nextPt);
    if (!seg->contains(nextImg)) {
      out.kind = SegmentCheckResult::Kind::Violation;
      out.violation = std::make_pair(nextPt, nextImg);
      return out;
    }
    if (parent->compare(prevImg, nextImg) != Ordering::Less) {
      out.kind = SegmentCheckResult::Kind::Violation;
      out.violation = std::make_pair(prevPt, nextPt);
      return out;
    }
    if (parent->compare(nextImg, nextPt) != Ordering::Less) {
      prevPt = nextPt;
      prevImg = nextImg;
      continue;
    }
    // the induction breaks here: extract the induced map between omega-powers
    std::vector<Code> rest = stripPrefix(prefix, nextImg);
    if (rest.empty()) throw InternalError("image collapsed onto the walk prefix");
    Code yDrop = rest[0];
    uint64_t lead = 0;
    while (lead < rest.size() && rest[lead] == yDrop) ++lead;

    auto fPtr = std::make_shared<EmbeddingWitness>(f);
    auto prefixPtr = std::make_shared<const std::vector<Code>>(prefix);
    Code escapeSentinel =
        Code::tuple(std::vector<Code>(static_cast<size_t>(lead) + 1, yDrop));
    EmbeddingWitness induced = EmbeddingWitness::rule(
        "inducedBlockMap", {},
        [fPtr, prefixPtr, escapeSentinel](const Code& rho) -> std::optional<Code> {
          std::vector<Code> full = *prefixPtr;
          for (const auto& e : rho.parts()) full.push_back(e);
          auto img = fPtr->apply(Code::tuple(std::move(full)));
          if (!img) return std::nullopt;
          const auto& parts = img->parts();
          if (parts.size() < prefixPtr->size()) return escapeSentinel;
          for (size_t i = 0; i < prefixPtr->size(); ++i)
            if (!(parts[i] == (*prefixPtr)[i])) return escapeSentinel;
          return Code::tuple(std::vector<Code>(parts.begin() + static_cast<long>(prefixPtr->size()),
                                               parts.end()));
        });
    out.kind = SegmentCheckResult::Kind::Refuted;
    out.failedPrefixLength = j;
    out.trace = refuteExponentDrop(induced, base, tau[j], yDrop, lead + 1, budget);
    return out;
  }
  throw InternalError("segment walk completed despite the bound mapping downward");
}

// --- ambient sums over reversed omega -------------------------------------------------

namespace {

class AmbientPresentation : public Presentation {
 public:
  explicit AmbientPresentation(std::vector<OrderTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw DomainError("ambient sum needs at least one term");
    for (const auto& t : terms_) blocks_.push_back(denote(t));
  }

  const OrderTerm& blockTerm(uint64_t i) const {
    return terms_[std::min<size_t>(i, terms_.size() - 1)];
  }
  const Presentation::Ptr& blockPres(uint64_t i) const {
    return blocks_[std::min<size_t>(i, blocks_.size() - 1)];
  }

  bool contains(const Code& c) const override {
    if (c.isLeaf() || c.parts().size() != 2 || !c.parts()[0].isLeaf()) return false;
    return blockPres(c.parts()[0].leaf())->contains(c.parts()[1]);
  }

  Ordering compare(const Code& a, const Code& b) const override {
    uint64_t ia = a.parts()[0].leaf(), ib = b.parts()[0].leaf();
    if (ia != ib) return ia > ib ? Ordering::Less : Ordering::Greater;
    return blockPres(ia)->compare(a.parts()[1], b.parts()[1]);
  }

  std::optional<Code> enumerate(uint64_t index) const override {
    std::lock_guard<std::mutex> lock(mu_);
    while (cache_.size() <= index) {
      // dovetail block index against within-block index
      for (uint64_t i = 0; i <= diag_; ++i) {
        auto c = blockPres(i)->enumerate(diag_ - i);
        if (c) cache_.push_back(Code::pair(i, std::move(*c)));
      }
      ++diag_;
    }
    return cache_[index];
  }

  std::optional<uint64_t> size() const override { return std::nullopt; }

  bool intervalFinite(const Code& a, const Code& b) const override {
    Ordering o = compare(a, b);
    if (o == Ordering::Equal) return true;
    const Code& lo = o == Ordering::Less ? a : b;
    const Code& hi = o == Ordering::Less ? b : a;
    uint64_t il = lo.parts()[0].leaf(), ih = hi.parts()[0].leaf();
    if (il == ih) return blockPres(il)->intervalFinite(lo.parts()[1], hi.parts()[1]);
    if (!blockPres(il)->aboveFinite(lo.parts()[1])) return false;
    if (!blockPres(ih)->belowFinite(hi.parts()[1])) return false;
    for (uint64_t k = ih + 1; k < il; ++k)
      if (!orderSize(blockTerm(k)).has_value()) return false;
    return true;
  }

  bool belowFinite(const Code&) const override { return false; }  // infinitely many blocks below

  bool aboveFinite(const Code& a) const override {
    uint64_t i = a.parts()[0].leaf();
    if (!blockPres(i)->aboveFinite(a.parts()[1])) return false;
    for (uint64_t k = 0; k < i; ++k)
      if (!orderSize(blockTerm(k)).has_value()) return false;
    return true;
  }

  std::string describe() const override {
    std::string s = "sum over rev(w) of [";
    for (size_t i = 0; i < terms_.size(); ++i) {
      if (i) s += ", ";
      s += terms_[i].show();
    }
    return s + ", ...]";
  }

 private:
  std::vector<OrderTerm> terms_;
  std::vector<Presentation::Ptr> blocks_;
  mutable std::mutex mu_;
  mutable std::vector<Code> cache_;
  mutable uint64_t diag_ = 0;
};

bool segmentContains(const AmbientSegment& seg, const AmbientPresentation& amb, const Code& c) {
  uint64_t i = c.parts()[0].leaf();
  if (i > seg.blockIndex) return true;
  if (i < seg.blockIndex) return false;
  if (!seg.bound) return true;
  return amb.blockPres(i)->compare(c.parts()[1], *seg.bound) == Ordering::Less;
}

// strict inclusion of initial segments
bool segmentProperlyInside(const AmbientSegment& inner, const AmbientSegment& outer,
                           const AmbientPresentation& amb) {
  if (inner.blockIndex > outer.blockIndex) return true;
  if (inner.blockIndex < outer.blockIndex) return false;
  if (!inner.bound) return false;  // inner covers the whole block
  if (!outer.bound) return true;
  return amb.blockPres(inner.blockIndex)->compare(*inner.bound, *outer.bound) == Ordering::Less;
}

}  // namespace

Presentation::Ptr ambientOmegaStarSum(std::vector<OrderTerm> terms) {
  return std::make_shared<AmbientPresentation>(std::move(terms));
}

EmbeddingWitness ambientBlockShift(std::vector<OrderTerm> terms) {
  auto amb = std::make_shared<AmbientPresentation>(terms);
  nlohmann::ordered_json params;
  params["shape"] = amb->describe();
  EmbeddingWitness w = EmbeddingWitness::rule(
      "blockShift", std::move(params), [amb](const Code& c) -> std::optional<Code> {
        if (!amb->contains(c)) return std::nullopt;
        uint64_t i = c.parts()[0].leaf();
        auto pos = amb->blockPres(i)->positionOf(c.parts()[1]);
        if (!pos) return std::nullopt;
        auto img = amb->blockPres(i + 1)->pointAtPosition(*pos);
        if (!img) return std::nullopt;
        return Code::pair(i + 1, std::move(*img));
      });
  return w;
}

FraisseResult fraisseExtract(const std::vector<OrderTerm>& terms, const EmbeddingWitness& f,
                             const AmbientSegment& dom, const AmbientSegment& cod) {
  for (const auto& t : terms) {
    if (!classify(t).isWellOrder || !orderTypeOf(t).isOmegaPower())
      throw DomainError("terms must be indecomposable well orders: " + t.show());
  }
  auto ambPtr = std::make_shared<AmbientPresentation>(terms);
  const AmbientPresentation& amb = *ambPtr;
  if (!segmentProperlyInside(cod, dom, amb))
    throw DomainError("the target segment must be properly inside the source segment");

  // verify f on a prefix of the source segment
  {
    std::vector<Code> pts, imgs;
    uint64_t idx = 0;
    while (pts.size() < 60 && idx < 4000) {
      auto c = amb.enumerate(idx++);
      if (!c) break;
      if (!segmentContains(dom, amb, *c)) continue;
      auto img = f.apply(*c);
      if (!img) throw IncompleteWitnessError("embedding undefined at " + c->repr());
      if (!amb.contains(*img) || !segmentContains(cod, amb, *img))
        throw DomainError("violation: image escapes the declared target segment at " + c->repr());
      pts.push_back(*c);
      imgs.push_back(*img);
    }
    for (size_t a = 0; a < pts.size(); ++a)
      for (size_t b = a + 1; b < pts.size(); ++b)
        if (amb.compare(pts[a], pts[b]) != amb.compare(imgs[a], imgs[b]))
          throw DomainError("violation: the supplied map is not order preserving");
  }

  constexpr uint64_t kHorizon = 40;
  uint64_t j = dom.blockIndex;
  AmbientSegment target = cod;

  if (target.blockIndex == j) {
    // the target ends inside the top block: pass to the part of the top block
    // that maps below it, shrinking the source on the way
    uint64_t firstInside = kHorizon;
    for (uint64_t p = 0; p < kHorizon; ++p) {
      auto pt = amb.blockPres(j)->pointAtPosition(Ord::finite(p));
      if (!pt) break;
      if (dom.bound &&
          amb.blockPres(j)->compare(*pt, *dom.bound) != Ordering::Less)
        break;
      auto img = f.apply(Code::pair(j, *pt));
      if (!img) throw IncompleteWitnessError("embedding undefined inside the top block");
      if (img->parts()[0].leaf() == j) {
        firstInside = p;
        break;
      }
    }
    if (firstInside == 0)
      throw DomainError(
          "violation: the top block maps into its own proper initial segment");
    target = AmbientSegment{j + 1, std::nullopt};
  } else if (target.blockIndex > j + 1 || target.bound) {
    target = AmbientSegment{j + 1, std::nullopt};  // extend to the whole-block segment
  }

  // where does block j+1 land?
  uint64_t srcBlock = j + 1;
  auto srcPres = amb.blockPres(srcBlock);
  std::optional<uint64_t> minImgBlock;
  std::optional<Code> transferStart;
  for (uint64_t p = 0; p < kHorizon; ++p) {
    auto pt = srcPres->pointAtPosition(Ord::finite(p));
    if (!pt) break;
    auto img = f.apply(Code::pair(srcBlock, *pt));
    if (!img) throw IncompleteWitnessError("embedding undefined inside the probed block");
    uint64_t ib = img->parts()[0].leaf();
    if (ib <= srcBlock)
      throw DomainError(
          "violation: a block maps into itself or above, which no embedding of well orders "
          "into the shorter segment allows");
    if (!minImgBlock || ib < *minImgBlock) {
      minImgBlock = ib;
      transferStart = *pt;
    }
  }
  if (!minImgBlock) throw DomainError("the probed block is empty");

  // locate the least probed point whose image reaches the topmost receiving
  // block; its final segment transfers into that block
  for (uint64_t p = 0; p < kHorizon; ++p) {
    auto pt = srcPres->pointAtPosition(Ord::finite(p));
    if (!pt) break;
    auto img = f.apply(Code::pair(srcBlock, *pt));
    if (img && img->parts()[0].leaf() == *minImgBlock) {
      transferStart = *pt;
      break;
    }
  }

  Ord cPos = *srcPres->positionOf(*transferStart);
  uint64_t dstBlock = *minImgBlock;
  auto dstPres = amb.blockPres(dstBlock);
  auto fPtr = std::make_shared<EmbeddingWitness>(f);
  nlohmann::ordered_json params;
  params["from"] = amb.blockTerm(srcBlock).show();
  params["to"] = amb.blockTerm(dstBlock).show();
  params["fromIndex"] = srcBlock;
  params["toIndex"] = dstBlock;
  EmbeddingWitness witness = EmbeddingWitness::rule(
      "transferThroughShift", std::move(params),
      [ambPtr, fPtr, srcBlock, dstBlock, cPos, srcPres](const Code& c) -> std::optional<Code> {
        auto px = srcPres->positionOf(c);
        if (!px) return std::nullopt;
        auto shifted = srcPres->pointAtPosition(cPos + *px);
        if (!shifted) return std::nullopt;
        auto img = fPtr->apply(Code::pair(srcBlock, *shifted));
        if (!img || img->parts()[0].leaf() != dstBlock) return std::nullopt;
        return img->parts()[1];
      });

  VerifyResult vr = verifyEmbedding(witness, *srcPres, *dstPres, 30);
  if (!vr.verified)
    throw DomainError("violation: the extracted block witness failed verification");
  return FraisseResult{srcBlock, dstBlock, std::move(witness)};
}

// --- bounded search --------------------------------------------------------------------

SearchResult searchEmbedding(const Presentation& dom, const Presentation& cod,
                             uint64_t prefixSize) {
  SearchResult out;
  FiniteOrder d = prefix(dom, prefixSize);
  FiniteOrder c = prefix(cod, 4 * prefixSize);
  // between linear orders the leftmost ascending matching is the
  // lexicographically least embedding and exists exactly when the codomain
  // prefix is long enough
  if (c.codes.size() < d.codes.size()) {
    out.noneUpTo = prefixSize;
    return out;
  }
  out.found = true;
  for (size_t k = 0; k < d.codes.size(); ++k)
    out.map.emplace_back(d.codes[d.sortedByOrder[k]], c.codes[c.sortedByOrder[k]]);
  std::sort(out.map.begin(), out.map.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  EmbeddingWitness w = EmbeddingWitness::finiteMap(out.map);
  VerifyResult vr = verifyEmbedding(w, dom, cod, d.codes.size());
  if (!vr.verified) throw InternalError("search produced a non-embedding");
  return out;
}

// --- deterministic adversaries -----------------------------------------------------------

namespace {

uint64_t ordDigest(const Ord& o) {
  uint64_t h = o.termCount() * 7 + 1;
  for (size_t i = 0; i < o.termCount(); ++i) {
    const Ord& e = o.exponentAt(i);
    h = h * 31 + (e.isFinite() ? e.finiteValue() : 99) * 13 + o.coefficientAt(i);
  }
  return h % 97;
}

}  // namespace

EmbeddingWitness adversarialSegmentMap(const CnfSeq& sigma, uint64_t seed) {
  if (sigma.length() == 0) throw DomainError("adversary needs a nonempty sequence");
  if (!classify(sigma.base()).isWellOrder)
    throw DomainError("adversary generator needs a well-order base");
  auto bp = sigma.basePresentationPtr();
  auto parent = denote(OrderTerm::omegaExp(sigma.base()));

  // a proper bound strictly below sigma, varied by seed
  size_t p = seed % sigma.length();
  std::vector<Code> boundEntries(sigma.entries().begin(),
                                 sigma.entries().begin() + static_cast<long>(p));
  Ord ep = *bp->positionOf(sigma.entries()[p]);
  if (!ep.isZero()) {
    Code d = *bp->pointAtPosition(Ord::leftSub(Ord::finite(1), ep));
    for (uint64_t k = 0; k <= seed % 3; ++k) boundEntries.push_back(d);
  }
  CnfSeq bound(sigma.base(), boundEntries);
  Ord btype = ordinalOfCnf(bound);
  if (btype.isZero()) {
    // the degenerate bound: every answer must already violate the claim
    EmbeddingWitness w = EmbeddingWitness::rule(
        "adversary", {{"seed", seed}},
        [](const Code&) -> std::optional<Code> { return Code::tuple({}); });
    w.claimedBound = bound.asPoint();
    return w;
  }
  auto segment = segmentOf(bound);
  std::vector<Code> fallbackPool;
  for (uint64_t i = 0; i < 12; ++i) {
    auto c = segment->enumerate(i);
    if (!c) break;
    fallbackPool.push_back(std::move(*c));
  }

  uint64_t strategy = seed % 4;
  Code capEntry = boundEntries.empty() ? sigma.entries()[0] : boundEntries[0];
  nlohmann::ordered_json params;
  params["seed"] = seed;
  params["strategy"] = strategy;
  EmbeddingWitness w = EmbeddingWitness::rule(
      "adversary", std::move(params),
      [bp, parent, btype, fallbackPool, strategy, seed, capEntry,
       sigma](const Code& c) -> std::optional<Code> {
        if (!parent->contains(c)) return std::nullopt;
        Ord q;
        for (const auto& e : c.parts()) q = q + Ord::omegaPow(*bp->positionOf(e));
        auto fallback = [&]() -> Code {
          return fallbackPool[(ordDigest(q) + seed) % fallbackPool.size()];
        };
        if (strategy == 2 && q == Ord::finite(2)) q = Ord::finite(5);
        else if (strategy == 2 && q == Ord::finite(5)) q = Ord::finite(2);
        if (strategy == 3 && q == Ord::finite(1)) return fallback();
        if (strategy == 1) {
          // cap every entry at the bound's leading entry, then clamp
          std::vector<Code> capped;
          for (const auto& e : c.parts())
            capped.push_back(bp->compare(e, capEntry) == Ordering::Greater ? capEntry : e);
          std::stable_sort(capped.begin(), capped.end(), [&](const Code& a, const Code& b) {
            return bp->compare(a, b) == Ordering::Greater;
          });
          Code cand = Code::tuple(std::move(capped));
          if (parent->compare(cand, Code::tuple({})) != Ordering::Equal) {
            Ord cq;
            for (const auto& e : cand.parts()) cq = cq + Ord::omegaPow(*bp->positionOf(e));
            if (cq < btype) return cand;
          }
          return fallback();
        }
        if (q < btype) return parent->pointAtPosition(q);
        return fallback();
      });
  w.claimedBound = bound.asPoint();
  return w;
}

EmbeddingWitness greedyExtensionMap(const CnfSeq& target) {
  struct State {
    std::mutex mu;
    std::vector<std::pair<Code, Code>> memo;  // dom point -> image
  };
  auto st = std::make_shared<State>();
  auto seg = segmentOf(target);
  auto parent = denote(OrderTerm::omegaExp(target.base()));
  nlohmann::ordered_json params;
  params["target"] = target.asPoint().repr();
  return EmbeddingWitness::rule(
      "greedyExtension", std::move(params), [st, seg, parent](const Code& c) -> std::optional<Code> {
        std::lock_guard<std::mutex> lock(st->mu);
        for (const auto& [d, img] : st->memo)
          if (d == c) return img;
        for (uint64_t i = 0; i < 2000; ++i) {
          auto cand = seg->enumerate(i);
          if (!cand) break;
          bool ok = true;
          for (const auto& [d, img] : st->memo) {
            if (parent->compare(c, d) != parent->compare(*cand, img)) {
              ok = false;
              break;
            }
          }
          if (ok) {
            st->memo.emplace_back(c, *cand);
            return *cand;
          }
        }
        // no consistent point: answer with the nearest image below (a forced
        // violation the caller will detect)
        std::optional<Code> best;
        std::optional<Code> bestImg;
        for (const auto& [d, img] : st->memo) {
          if (parent->compare(d, c) == Ordering::Less &&
              (!best || parent->compare(*best, d) == Ordering::Less)) {
            best = d;
            bestImg = img;
          }
        }
        Code img = bestImg ? *bestImg : *seg->enumerate(0);
        st->memo.emplace_back(c, img);
        return img;
      });
}

}  // namespace ordlab
