#include "stoqmc/bits.hpp"

#include "stoqmc/errors.hpp"

namespace stoqmc {

std::string to_bitstring(Basis x, int n) {
  std::string out(static_cast<std::size_t>(n), '0');
  for (int u = 0; u < n; ++u) {
    if (bit_of(x, u)) out[static_cast<std::size_t>(u)] = '1';
  }
  return out;
}

Basis parse_bitstring(std::string_view text, int n) {
  if (static_cast<int>(text.size()) != n) {
    throw ValidationError("bitstring '" + std::string(text) + "' has length " +
                          std::to_string(text.size()) + ", expected " + std::to_string(n));
  }
  Basis x = 0;
  for (int u = 0; u < n; ++u) {
    const char c = text[static_cast<std::size_t>(u)];
    if (c == '1') {
      x |= Basis{1} << u;
    } else if (c != '0') {
      throw ValidationError("bitstring '" + std::string(text) + "' contains '" + c + "'");
    }
  }
  return x;
}

bool lexicographically_less(Basis a, Basis b, int n) {
  for (int u = 0; u < n; ++u) {
    const int ba = bit_of(a, u);
    const int bb = bit_of(b, u);
    if (ba != bb) return ba < bb;
  }
  return false;
}

}  // namespace stoqmc
