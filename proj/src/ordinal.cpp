#include "ordlab/ordinal.hpp"

#include "ordlab/errors.hpp"

namespace ordlab {

Ord Ord::finite(uint64_t n) {
  Ord r;
  if (n > 0) r.parts_.push_back(OrdPart{Ord(), n});
  return r;
}

Ord Ord::omega() { return omegaPow(finite(1)); }

Ord Ord::omegaPow(const Ord& exp) { return omegaPowTimes(exp, 1); }

Ord Ord::omegaPowTimes(const Ord& exp, uint64_t n) {
  Ord r;
  if (n > 0) r.parts_.push_back(OrdPart{exp, n});
  return r;
}

bool Ord::isZero() const { return parts_.empty(); }

bool Ord::isFinite() const {
  return parts_.empty() || (parts_.size() == 1 && parts_[0].exp.isZero());
}

uint64_t Ord::finiteValue() const {
  if (!isFinite()) throw InternalError("Ord::finiteValue on infinite ordinal");
  return parts_.empty() ? 0 : parts_[0].coeff;
}

bool Ord::isOmegaPower() const { return parts_.size() == 1 && parts_[0].coeff == 1; }

size_t Ord::termCount() const { return parts_.size(); }
const Ord& Ord::exponentAt(size_t i) const { return parts_[i].exp; }
uint64_t Ord::coefficientAt(size_t i) const { return parts_[i].coeff; }

int Ord::cmp(const Ord& a, const Ord& b) {
  size_t n = a.parts_.size() < b.parts_.size() ? a.parts_.size() : b.parts_.size();
  for (size_t i = 0; i < n; ++i) {
    int c = cmp(a.parts_[i].exp, b.parts_[i].exp);
    if (c != 0) return c;
    if (a.parts_[i].coeff != b.parts_[i].coeff)
      return a.parts_[i].coeff < b.parts_[i].coeff ? -1 : 1;
  }
  if (a.parts_.size() != b.parts_.size()) return a.parts_.size() < b.parts_.size() ? -1 : 1;
  return 0;
}

Ord Ord::operator+(const Ord& b) const {
  if (b.isZero()) return *this;
  const Ord& lead = b.parts_[0].exp;
  Ord r;
  for (const auto& p : parts_) {
    if (cmp(p.exp, lead) > 0)
      r.parts_.push_back(p);
    else
      break;
  }
  // Merge an equal leading exponent, then append the rest of b.
  size_t kept = r.parts_.size();
  if (kept < parts_.size() && cmp(parts_[kept].exp, lead) == 0) {
    r.parts_.push_back(OrdPart{lead, parts_[kept].coeff + b.parts_[0].coeff});
  } else {
    r.parts_.push_back(b.parts_[0]);
  }
  for (size_t i = 1; i < b.parts_.size(); ++i) r.parts_.push_back(b.parts_[i]);
  return r;
}

Ord Ord::leftSub(const Ord& a, const Ord& b) {
  size_t i = 0;
  while (i < a.parts_.size() && i < b.parts_.size()) {
    int c = cmp(a.parts_[i].exp, b.parts_[i].exp);
    if (c != 0 || a.parts_[i].coeff != b.parts_[i].coeff) break;
    ++i;
  }
  Ord r;
  if (i == a.parts_.size()) {
    for (size_t k = i; k < b.parts_.size(); ++k) r.parts_.push_back(b.parts_[k]);
    return r;
  }
  if (i == b.parts_.size()) throw InternalError("Ord::leftSub: minuend smaller");
  int c = cmp(a.parts_[i].exp, b.parts_[i].exp);
  if (c > 0) throw InternalError("Ord::leftSub: minuend smaller");
  if (c == 0) {
    if (a.parts_[i].coeff > b.parts_[i].coeff)
      throw InternalError("Ord::leftSub: minuend smaller");
    r.parts_.push_back(OrdPart{b.parts_[i].exp, b.parts_[i].coeff - a.parts_[i].coeff});
    for (size_t k = i + 1; k < b.parts_.size(); ++k) r.parts_.push_back(b.parts_[k]);
    return r;
  }
  // a's term at i has a smaller exponent; b's tail from i absorbs a's tail.
  for (size_t k = i; k < b.parts_.size(); ++k) r.parts_.push_back(b.parts_[k]);
  return r;
}

OrdDivMod Ord::divModOmegaPow(const Ord& exp) const {
  OrdDivMod dm;
  for (const auto& p : parts_) {
    if (cmp(p.exp, exp) >= 0)
      dm.quotient.parts_.push_back(OrdPart{leftSub(exp, p.exp), p.coeff});
    else
      dm.remainder.parts_.push_back(p);
  }
  return dm;
}

std::string Ord::show() const {
  if (isZero()) return "0";
  std::string s;
  for (size_t i = 0; i < parts_.size(); ++i) {
    if (i) s += '+';
    const auto& p = parts_[i];
    if (p.exp.isZero()) {
      s += std::to_string(p.coeff);
      continue;
    }
    if (p.exp == Ord::finite(1))
      s += "w";
    else if (p.exp.isFinite())
      s += "w^" + std::to_string(p.exp.finiteValue());
    else
      s += "w^(" + p.exp.show() + ")";
    if (p.coeff != 1) s += "*" + std::to_string(p.coeff);
  }
  return s;
}

}  // namespace ordlab
