#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace stoqmc {

/// Computational basis state of up to 63 qubits. Qubit u is bit u.
using Basis = std::uint64_t;

inline constexpr int kMaxQubits = 63;

constexpr int bit_of(Basis x, int qubit) { return static_cast<int>((x >> qubit) & 1U); }

constexpr Basis flip(Basis x, int qubit) { return x ^ (Basis{1} << qubit); }

constexpr Basis basis_dimension(int n) { return Basis{1} << n; }

/// Renders x as n characters; character u is the value of qubit u.
std::string to_bitstring(Basis x, int n);

/// Inverse of to_bitstring. Throws ValidationError on length or alphabet errors.
Basis parse_bitstring(std::string_view text, int n);

/// Strict weak order matching lexicographic order of to_bitstring(., n).
bool lexicographically_less(Basis a, Basis b, int n);

}  // namespace stoqmc
