#include "polmod/rational.hpp"

#include <mutex>
#include <vector>

namespace polmod {

const Int& factorial(std::size_t k) {
  static std::vector<Int> table{Int(1)};
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  while (table.size() <= k) {
    table.push_back(table.back() * Int(table.size()));
  }
  return table[k];
}

Rat inv_factorial(std::size_t k) { return Rat(Int(1), factorial(k)); }

std::string format_rat(const Rat& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

std::optional<Int> parse_int(std::string_view s) {
  if (s.empty()) return {};
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return {};
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') return {};
  }
  return Int(std::string(s));
}

std::optional<Rat> parse_rat(std::string_view s) {
  auto slash = s.find('/');
  if (slash == std::string_view::npos) {
    auto n = parse_int(s);
    if (!n) return {};
    return Rat(*n);
  }
  auto num = parse_int(s.substr(0, slash));
  auto den = parse_int(s.substr(slash + 1));
  if (!num || !den || *den == 0) return {};
  return Rat(*num, *den);
}

}  // namespace polmod
