// Exact arithmetic for ordinals below epsilon_0 in Cantor normal form.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ordlab {

struct OrdPart;
struct OrdDivMod;

// An ordinal below epsilon_0, stored as omega^e0*c0 + ... + omega^ek*ck with
// strictly decreasing exponents (themselves ordinals) and coefficients >= 1.
// Zero is the empty sum. Values are immutable.
class Ord {
 public:
  Ord() = default;  // zero

  static Ord finite(uint64_t n);
  static Ord omega();
  static Ord omegaPow(const Ord& exp);                     // omega^exp
  static Ord omegaPowTimes(const Ord& exp, uint64_t n);    // omega^exp * n

  bool isZero() const;
  bool isFinite() const;
  uint64_t finiteValue() const;  // requires isFinite()

  // Single CNF term with coefficient 1 (additively indecomposable or zero-ish).
  bool isOmegaPower() const;

  size_t termCount() const;
  const Ord& exponentAt(size_t i) const;
  uint64_t coefficientAt(size_t i) const;

  static int cmp(const Ord& a, const Ord& b);
  bool operator==(const Ord& o) const { return cmp(*this, o) == 0; }
  bool operator!=(const Ord& o) const { return cmp(*this, o) != 0; }
  bool operator<(const Ord& o) const { return cmp(*this, o) < 0; }
  bool operator<=(const Ord& o) const { return cmp(*this, o) <= 0; }
  bool operator>(const Ord& o) const { return cmp(*this, o) > 0; }
  bool operator>=(const Ord& o) const { return cmp(*this, o) >= 0; }

  Ord operator+(const Ord& b) const;

  // The unique c with a + c = b, for a <= b. Throws InternalError otherwise.
  static Ord leftSub(const Ord& a, const Ord& b);

  // alpha = omega^exp * quotient + remainder with remainder < omega^exp.
  OrdDivMod divModOmegaPow(const Ord& exp) const;

  // Rendering like "w^(w)*2+w^2+3"; finite ordinals print as plain numbers.
  std::string show() const;

 private:
  std::vector<OrdPart> parts_;
};

struct OrdPart {
  Ord exp;
  uint64_t coeff;
};

struct OrdDivMod {
  Ord quotient;
  Ord remainder;
};

}  // namespace ordlab
