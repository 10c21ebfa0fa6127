// The fixed computable coding of the rationals used by every presentation.
//
// Point k names the k-th finite binary string in shortlex order (``, `0`, `1`,
// `00`, ...). A string s of length L denotes the dyadic rational with binary
// expansion 0.s1, i.e. (2*val(s)+1) / 2^(L+1). This maps the codes bijectively
// onto the dyadic rationals in (0,1), a dense order without endpoints, and the
// comparison below is exact integer arithmetic. Bit-exact by construction:
// the same index always denotes the same rational.
#pragma once

#include <cstdint>
#include <string>

#include "ordlab/code.hpp"

namespace ordlab {

std::string rationalStringOfIndex(uint64_t index);
uint64_t rationalIndexOfString(const std::string& bits);
Ordering rationalCompare(uint64_t a, uint64_t b);

}  // namespace ordlab
