#pragma once

#include <array>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bbqec/binary_matrix.hpp"
#include "bbqec/monomial.hpp"

namespace bbqec {

/// Polynomial definition of a bivariate bicycle code, A = A1+A2+A3 and B = B1+B2+B3.
/// The declared parameters are metadata; only n and k are ever checked.
struct BBCodeSpec {
  std::string name;
  GroupShape shape;
  std::array<Monomial, 3> a_terms{};
  std::array<Monomial, 3> b_terms{};
  int declared_n{0};
  int declared_k{0};
  int declared_d{0};

  int n() const { return 2 * shape.size(); }
  /// k d^2 / n
  double figure_of_merit() const {
    return static_cast<double>(declared_k) * declared_d * declared_d / static_cast<double>(declared_n);
  }
};

inline void validate(const BBCodeSpec& spec) {
  if (spec.shape.l <= 0 || spec.shape.m <= 0) throw std::invalid_argument("l and m must be positive");
  for (const auto* terms : {&spec.a_terms, &spec.b_terms}) {
    std::set<Monomial> distinct;
    for (const Monomial& t : *terms) {
      if (!is_canonical(t, spec.shape)) throw std::invalid_argument("monomial exponent out of range");
      distinct.insert(t);
    }
    if (distinct.size() != 3) throw std::invalid_argument("polynomial terms must be 3 distinct monomials");
  }
  if (spec.declared_n != spec.n())
    throw std::invalid_argument("declared n=" + std::to_string(spec.declared_n) + " but 2lm=" +
                                std::to_string(spec.n()));
}

inline BBCodeSpec make_code(std::string name, int l, int m, const std::array<std::string_view, 3>& a,
                            const std::array<std::string_view, 3>& b, int n, int k, int d) {
  BBCodeSpec spec{std::move(name), {l, m}, {}, {}, n, k, d};
  for (int i = 0; i < 3; ++i) {
    spec.a_terms[static_cast<std::size_t>(i)] = parse_monomial(a[static_cast<std::size_t>(i)], spec.shape);
    spec.b_terms[static_cast<std::size_t>(i)] = parse_monomial(b[static_cast<std::size_t>(i)], spec.shape);
  }
  validate(spec);
  return spec;
}

/// The five benchmark codes, keyed by their [[n,k,d]] name.
inline const std::vector<BBCodeSpec>& code_presets() {
  static const std::vector<BBCodeSpec> presets = {
      make_code("[[72,12,6]]", 6, 6, {"x3", "y", "y2"}, {"y3", "x", "x2"}, 72, 12, 6),
      make_code("[[90,8,10]]", 15, 3, {"x9", "y", "y2"}, {"1", "x2", "x7"}, 90, 8, 10),
      make_code("[[108,8,10]]", 9, 6, {"x3", "y", "y2"}, {"y3", "x", "x2"}, 108, 8, 10),
      make_code("[[144,12,12]]", 12, 6, {"x3", "y", "y2"}, {"y3", "x", "x2"}, 144, 12, 12),
      make_code("[[288,12,18]]", 12, 12, {"x3", "y2", "y7"}, {"y3", "x", "x2"}, 288, 12, 18),
  };
  return presets;
}

/// Accepts "[[144,12,12]]", "144,12,12" or just "144".
inline const BBCodeSpec& find_code_preset(std::string_view key) {
  std::string k;
  for (char c : key)
    if (c != '[' && c != ']' && c != ' ') k += c;
  for (const auto& p : code_presets()) {
    std::string pk;
    for (char c : p.name)
      if (c != '[' && c != ']') pk += c;
    if (pk == k || pk.substr(0, pk.find(',')) == k) return p;
  }
  throw std::out_of_range("unknown code preset '" + std::string(key) + "'");
}

/// Cyclic shift S_l: row i has its single one at column (i+1) mod l.
inline BinaryMatrix shift_matrix(int l) {
  if (l <= 0) throw std::invalid_argument("shift matrix dimension must be positive");
  BinaryMatrix s(l, l);
  for (int i = 0; i < l; ++i) s.set(i, (i + 1) % l, true);
  return s;
}

inline BinaryMatrix matrix_power(const BinaryMatrix& a, int k) {
  BinaryMatrix r = BinaryMatrix::identity(a.rows());
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

/// x^p y^q = S_l^p (x) S_m^q
inline BinaryMatrix monomial_matrix(Monomial mono, GroupShape g) {
  if (!is_canonical(mono, g)) throw std::invalid_argument("monomial exponent out of range");
  return BinaryMatrix::kron(matrix_power(shift_matrix(g.l), mono.p), matrix_power(shift_matrix(g.m), mono.q));
}

struct CheckMatrices {
  BinaryMatrix hx;
  BinaryMatrix hz;
};

inline BinaryMatrix polynomial_matrix(const std::array<Monomial, 3>& terms, GroupShape g) {
  BinaryMatrix sum(g.size(), g.size());
  for (const Monomial& t : terms) sum = sum + monomial_matrix(t, g);
  return sum;
}

/// H^X = [A | B], H^Z = [B^T | A^T].
inline CheckMatrices build_check_matrices(const BBCodeSpec& spec) {
  validate(spec);
  const BinaryMatrix a = polynomial_matrix(spec.a_terms, spec.shape);
  const BinaryMatrix b = polynomial_matrix(spec.b_terms, spec.shape);
  return {BinaryMatrix::hconcat(a, b), BinaryMatrix::hconcat(b.transpose(), a.transpose())};
}

/// Number of logical qubits of the CSS code: n - rank(H^X) - rank(H^Z).
inline int compute_k(const BinaryMatrix& hx, const BinaryMatrix& hz) {
  if (hx.cols() != hz.cols()) throw std::invalid_argument("check matrices act on different qubit counts");
  return hx.cols() - hx.rank() - hz.rank();
}

enum class QubitKind { L, R, X, Z };

inline constexpr const char* kind_name(QubitKind k) {
  switch (k) {
    case QubitKind::L: return "L";
    case QubitKind::R: return "R";
    case QubitKind::X: return "X";
    case QubitKind::Z: return "Z";
  }
  return "?";
}

inline QubitKind parse_kind(char c) {
  switch (c) {
    case 'L': return QubitKind::L;
    case 'R': return QubitKind::R;
    case 'X': return QubitKind::X;
    case 'Z': return QubitKind::Z;
    default: throw std::invalid_argument(std::string("unknown qubit kind '") + c + "'");
  }
}

struct QubitId {
  QubitKind kind{QubitKind::L};
  int index{0};

  friend constexpr bool operator==(const QubitId&, const QubitId&) = default;
  friend constexpr auto operator<=>(const QubitId&, const QubitId&) = default;
};

inline std::string to_string(QubitId q) { return kind_name(q.kind) + std::to_string(q.index); }

struct TannerEdge {
  QubitId check;
  QubitId data;
};

/// Checks connected to the data qubits they measure. Checks are numbered
/// 0..lm-1 for X and lm..2lm-1 for Z in check_neighbors.
struct TannerGraph {
  int half{0};  ///< lm, the size of each of the four qubit families
  std::vector<TannerEdge> edges;
  std::vector<std::vector<QubitId>> check_neighbors;

  int num_checks() const { return 2 * half; }
  QubitId check_id(int c) const { return c < half ? QubitId{QubitKind::X, c} : QubitId{QubitKind::Z, c - half}; }
  int check_index(QubitId q) const { return q.kind == QubitKind::X ? q.index : half + q.index; }
};

inline TannerGraph tanner_graph(const CheckMatrices& h) {
  TannerGraph t;
  t.half = h.hx.rows();
  t.check_neighbors.resize(static_cast<std::size_t>(2 * t.half));
  auto add = [&](const BinaryMatrix& mat, QubitKind kind) {
    for (int r = 0; r < mat.rows(); ++r) {
      const QubitId check{kind, r};
      for (int c : mat.row_support(r)) {
        const QubitId data = c < t.half ? QubitId{QubitKind::L, c} : QubitId{QubitKind::R, c - t.half};
        t.edges.push_back({check, data});
        t.check_neighbors[static_cast<std::size_t>(t.check_index(check))].push_back(data);
      }
    }
  };
  add(h.hx, QubitKind::X);
  add(h.hz, QubitKind::Z);
  return t;
}

inline TannerGraph tanner_graph(const BBCodeSpec& spec) { return tanner_graph(build_check_matrices(spec)); }

}  // namespace bbqec
