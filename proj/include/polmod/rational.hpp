#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace polmod {

// All arithmetic in the library is exact; no floating point anywhere.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Norm values and term weights are natural numbers.
using Weight = std::uint64_t;

const Int& factorial(std::size_t k);
Rat inv_factorial(std::size_t k);

// "p" when the denominator is 1, "p/q" otherwise.
std::string format_rat(const Rat& q);
std::optional<Rat> parse_rat(std::string_view s);
std::optional<Int> parse_int(std::string_view s);

inline Int abs_int(const Int& n) { return n < 0 ? Int(-n) : n; }
inline Rat abs_rat(const Rat& q) { return q < 0 ? Rat(-q) : q; }

}  // namespace polmod
