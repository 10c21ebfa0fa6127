// Point codes: canonical finite tuples of naturals, nested.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace ordlab {

// A code is either a natural number or a finite tuple of codes. Which shapes
// are valid points, and how they compare, is decided by the presentation that
// owns them; codes themselves are inert data with a structural total order so
// they can key maps and sets.
class Code {
 public:
  Code() : data_(uint64_t{0}) {}
  explicit Code(uint64_t leaf) : data_(leaf) {}

  static Code tuple(std::vector<Code> parts) {
    Code c;
    c.data_ = std::move(parts);
    return c;
  }
  static Code pair(uint64_t tag, Code inner) {
    std::vector<Code> v;
    v.emplace_back(tag);
    v.push_back(std::move(inner));
    return tuple(std::move(v));
  }

  bool isLeaf() const { return std::holds_alternative<uint64_t>(data_); }
  uint64_t leaf() const { return std::get<uint64_t>(data_); }
  const std::vector<Code>& parts() const { return std::get<std::vector<Code>>(data_); }

  bool operator==(const Code& o) const { return structuralCmp(*this, o) == 0; }
  bool operator!=(const Code& o) const { return !(*this == o); }
  // Structural order, unrelated to any presentation's order; for containers.
  bool operator<(const Code& o) const { return structuralCmp(*this, o) < 0; }

  std::string repr() const {
    if (isLeaf()) return std::to_string(leaf());
    std::string s = "(";
    const auto& ps = parts();
    for (size_t i = 0; i < ps.size(); ++i) {
      if (i) s += ' ';
      s += ps[i].repr();
    }
    s += ')';
    return s;
  }

  nlohmann::ordered_json toJson() const {
    if (isLeaf()) return leaf();
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : parts()) arr.push_back(p.toJson());
    return arr;
  }

  static std::optional<Code> fromJson(const nlohmann::json& j) {
    if (j.is_number_unsigned()) return Code(j.get<uint64_t>());
    if (j.is_array()) {
      std::vector<Code> ps;
      for (const auto& e : j) {
        auto p = fromJson(e);
        if (!p) return std::nullopt;
        ps.push_back(std::move(*p));
      }
      return tuple(std::move(ps));
    }
    return std::nullopt;
  }

 private:
  static int structuralCmp(const Code& a, const Code& b) {
    if (a.isLeaf() != b.isLeaf()) return a.isLeaf() ? -1 : 1;
    if (a.isLeaf()) return a.leaf() < b.leaf() ? -1 : (a.leaf() == b.leaf() ? 0 : 1);
    const auto& pa = a.parts();
    const auto& pb = b.parts();
    for (size_t i = 0; i < pa.size() && i < pb.size(); ++i) {
      int c = structuralCmp(pa[i], pb[i]);
      if (c != 0) return c;
    }
    if (pa.size() != pb.size()) return pa.size() < pb.size() ? -1 : 1;
    return 0;
  }

  std::variant<uint64_t, std::vector<Code>> data_;
};

enum class Ordering { Less, Equal, Greater };

inline Ordering orderingFromInt(int c) {
  return c < 0 ? Ordering::Less : (c == 0 ? Ordering::Equal : Ordering::Greater);
}

inline Ordering flip(Ordering o) {
  switch (o) {
    case Ordering::Less: return Ordering::Greater;
    case Ordering::Greater: return Ordering::Less;
    default: return Ordering::Equal;
  }
}

}  // namespace ordlab
