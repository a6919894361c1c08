#pragma once

#include <cctype>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bbqec {

/// Abelian group Z_l x Z_m, the labeling algebra of a bivariate bicycle code.
struct GroupShape {
  int l{1};
  int m{1};

  constexpr int size() const { return l * m; }
  friend constexpr bool operator==(const GroupShape&, const GroupShape&) = default;
};

/// Element x^p y^q of the monomial group. Always kept in canonical form
/// 0 <= p < l, 0 <= q < m for the group it was created in.
struct Monomial {
  int p{0};
  int q{0};

  static constexpr Monomial identity() { return {0, 0}; }

  friend constexpr bool operator==(const Monomial&, const Monomial&) = default;
  friend constexpr auto operator<=>(const Monomial&, const Monomial&) = default;
};

inline constexpr int mod(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

inline Monomial make_monomial(int p, int q, GroupShape g) {
  if (g.l <= 0 || g.m <= 0) throw std::invalid_argument("group dimensions must be positive");
  return {mod(p, g.l), mod(q, g.m)};
}

inline bool is_canonical(Monomial a, GroupShape g) {
  return a.p >= 0 && a.p < g.l && a.q >= 0 && a.q < g.m;
}

inline constexpr Monomial multiply(Monomial a, Monomial b, GroupShape g) {
  return {mod(a.p + b.p, g.l), mod(a.q + b.q, g.m)};
}

/// Inverse, which is also the transpose of the corresponding permutation matrix.
inline constexpr Monomial inverse(Monomial a, GroupShape g) { return {mod(-a.p, g.l), mod(-a.q, g.m)}; }

inline constexpr Monomial power(Monomial a, long long k, GroupShape g) {
  const long long p = (static_cast<long long>(a.p) * k) % g.l;
  const long long q = (static_cast<long long>(a.q) * k) % g.m;
  return {mod(static_cast<int>(p), g.l), mod(static_cast<int>(q), g.m)};
}

/// Row-major label index used for the columns of the check matrices: x^p y^q -> p*m + q.
inline constexpr int index_of(Monomial a, GroupShape g) { return a.p * g.m + a.q; }
inline constexpr Monomial monomial_at(int index, GroupShape g) { return {index / g.m, index % g.m}; }

/// Smallest k >= 1 with a^k = 1.
inline int order(Monomial a, GroupShape g) {
  const int op = g.l / std::gcd(a.p, g.l);
  const int oq = g.m / std::gcd(a.q, g.m);
  return std::lcm(op, oq);
}

/// Parses "1", "x", "y", "x3", "x3y2", "x^3y^2", "x3*y2". Exponents are reduced into the group.
inline Monomial parse_monomial(std::string_view text, GroupShape g) {
  int p = 0;
  int q = 0;
  std::size_t i = 0;
  bool any = false;
  auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*')) ++i;
  };
  skip();
  if (i < text.size() && text[i] == '1') {
    ++i;
    skip();
    if (i != text.size()) throw std::invalid_argument("malformed monomial '" + std::string(text) + "'");
    return make_monomial(0, 0, g);
  }
  while (i < text.size()) {
    const char v = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    if (v != 'x' && v != 'y') throw std::invalid_argument("malformed monomial '" + std::string(text) + "'");
    ++i;
    if (i < text.size() && text[i] == '^') ++i;
    int e = 0;
    bool digits = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      e = e * 10 + (text[i] - '0');
      ++i;
      digits = true;
    }
    if (!digits) e = 1;
    (v == 'x' ? p : q) += e;
    any = true;
    skip();
  }
  if (!any) throw std::invalid_argument("empty monomial");
  return make_monomial(p, q, g);
}

inline std::string to_string(Monomial a) {
  if (a.p == 0 && a.q == 0) return "1";
  std::string s;
  if (a.p > 0) s += a.p == 1 ? "x" : "x" + std::to_string(a.p);
  if (a.q > 0) s += a.q == 1 ? "y" : "y" + std::to_string(a.q);
  return s;
}

/// Size of the subgroup generated by the given elements, by breadth-first closure.
inline int generated_subgroup_size(const std::vector<Monomial>& gens, GroupShape g) {
  std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
  std::vector<Monomial> frontier{Monomial::identity()};
  seen[0] = 1;
  int count = 1;
  while (!frontier.empty()) {
    const Monomial cur = frontier.back();
    frontier.pop_back();
    for (const Monomial& s : gens) {
      const Monomial nxt = multiply(cur, s, g);
      auto& flag = seen[static_cast<std::size_t>(index_of(nxt, g))];
      if (!flag) {
        flag = 1;
        ++count;
        frontier.push_back(nxt);
      }
    }
  }
  return count;
}

}  // namespace bbqec
