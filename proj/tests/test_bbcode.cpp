#include <gtest/gtest.h>

#include <random>

#include "bbqec/bbcode.hpp"

using namespace bbqec;

namespace {

BinaryMatrix from_rows(const std::vector<std::vector<int>>& rows) {
  BinaryMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.set(static_cast<int>(r), static_cast<int>(c), rows[r][c]);
  return m;
}

bool is_permutation_matrix(const BinaryMatrix& m) {
  for (int i = 0; i < m.rows(); ++i)
    if (m.row_weight(i) != 1) return false;
  for (int j = 0; j < m.cols(); ++j)
    if (m.col_weight(j) != 1) return false;
  return true;
}

// Plain triple loop over GF(2), independent of the packed multiply.
BinaryMatrix slow_multiply(const BinaryMatrix& a, const BinaryMatrix& b) {
  BinaryMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      bool acc = false;
      for (int k = 0; k < a.cols(); ++k) acc ^= a.get(i, k) && b.get(k, j);
      c.set(i, j, acc);
    }
  return c;
}

}  // namespace

TEST(ShiftMatrix, ThreeByThree) {
  EXPECT_EQ(shift_matrix(3), from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
}

TEST(ShiftMatrix, OneByOneIsIdentity) { EXPECT_EQ(shift_matrix(1), BinaryMatrix::identity(1)); }

TEST(ShiftMatrix, HasOrderL) { EXPECT_EQ(matrix_power(shift_matrix(5), 5), BinaryMatrix::identity(5)); }

TEST(ShiftMatrix, RejectsZero) { EXPECT_THROW(shift_matrix(0), std::invalid_argument); }

TEST(MonomialMatrix, IdentityMonomial) {
  EXPECT_EQ(monomial_matrix(Monomial::identity(), {12, 6}), BinaryMatrix::identity(72));
}

TEST(MonomialMatrix, XYOnTwoByTwo) {
  // S2 (x) S2 expanded by hand: every index i maps to i ^ 3.
  EXPECT_EQ(monomial_matrix({1, 1}, {2, 2}), from_rows({{0, 0, 0, 1}, {0, 0, 1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}}));
}

TEST(MonomialMatrix, RejectsOutOfRangeExponent) {
  EXPECT_THROW(monomial_matrix({12, 0}, {12, 6}), std::invalid_argument);
}

TEST(MonomialMatrix, PermutationAndHomomorphism) {
  const GroupShape g{6, 4};
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> p(0, g.l - 1), q(0, g.m - 1);
  for (int t = 0; t < 25; ++t) {
    const Monomial a{p(rng), q(rng)}, b{p(rng), q(rng)};
    const BinaryMatrix ma = monomial_matrix(a, g), mb = monomial_matrix(b, g);
    EXPECT_TRUE(is_permutation_matrix(ma));
    EXPECT_EQ(ma * mb, monomial_matrix(multiply(a, b, g), g));
    EXPECT_EQ(ma.transpose(), monomial_matrix(inverse(a, g), g));
  }
}

TEST(Monomial, Orders) {
  const GroupShape g{12, 6};
  EXPECT_EQ(order(Monomial::identity(), g), 1);
  EXPECT_EQ(order({1, 0}, g), 12);
  EXPECT_EQ(order({0, 1}, g), 6);
  EXPECT_EQ(order({2, 3}, g), 6);
}

TEST(Monomial, ParseAndPrint) {
  const GroupShape g{12, 6};
  EXPECT_EQ(parse_monomial("x2y3", g), (Monomial{2, 3}));
  EXPECT_EQ(parse_monomial("x^11 y^4", g), (Monomial{11, 4}));
  EXPECT_EQ(parse_monomial("1", g), Monomial::identity());
  EXPECT_EQ(to_string(Monomial{1, 1}), "xy");
  EXPECT_THROW(parse_monomial("z3", g), std::invalid_argument);
}

TEST(CheckMatrices, ShapeOf144) {
  const CheckMatrices h = build_check_matrices(find_code_preset("[[144,12,12]]"));
  EXPECT_EQ(h.hx.rows(), 72);
  EXPECT_EQ(h.hx.cols(), 144);
  EXPECT_EQ(h.hz.rows(), 72);
  EXPECT_EQ(h.hz.cols(), 144);
}

TEST(CheckMatrices, AllPresetsCommuteWithWeight6Rows) {
  for (const BBCodeSpec& code : code_presets()) {
    SCOPED_TRACE(code.name);
    const CheckMatrices h = build_check_matrices(code);
    EXPECT_TRUE(slow_multiply(h.hx, h.hz.transpose()).is_zero());
    for (int i = 0; i < h.hx.rows(); ++i) {
      ASSERT_EQ(h.hx.row_weight(i), 6);
      ASSERT_EQ(h.hz.row_weight(i), 6);
    }
    for (int j = 0; j < h.hx.cols(); ++j) {
      ASSERT_EQ(h.hx.col_weight(j), 3);
      ASSERT_EQ(h.hz.col_weight(j), 3);
    }
  }
}

TEST(ComputeK, MatchesDeclaredForAllPresets) {
  for (const BBCodeSpec& code : code_presets()) {
    const CheckMatrices h = build_check_matrices(code);
    EXPECT_EQ(compute_k(h.hx, h.hz), code.declared_k) << code.name;
  }
}

TEST(ComputeK, ZeroMatrices) {
  const BinaryMatrix z(36, 72);
  EXPECT_EQ(compute_k(z, z), 72);
}

TEST(BinaryMatrix, RankOfSmallMatrices) {
  EXPECT_EQ(BinaryMatrix::identity(70).rank(), 70);
  EXPECT_EQ(from_rows({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}).rank(), 2);
  EXPECT_EQ(BinaryMatrix(3, 5).rank(), 0);
}

TEST(TannerGraph, EdgeCounts) {
  EXPECT_EQ(tanner_graph(find_code_preset("[[144,12,12]]")).edges.size(), 864u);
  EXPECT_EQ(tanner_graph(find_code_preset("[[72,12,6]]")).edges.size(), 432u);
}

TEST(TannerGraph, EveryDataQubitHasThreeChecksOfEachKind) {
  for (const BBCodeSpec& code : code_presets()) {
    const TannerGraph tg = tanner_graph(code);
    std::map<std::pair<int, int>, std::array<int, 2>> deg;
    for (const TannerEdge& e : tg.edges)
      ++deg[{static_cast<int>(e.data.kind), e.data.index}][e.check.kind == QubitKind::X ? 0 : 1];
    ASSERT_EQ(static_cast<int>(deg.size()), code.n()) << code.name;
    for (const auto& [q, d] : deg) {
      EXPECT_EQ(d[0], 3);
      EXPECT_EQ(d[1], 3);
    }
  }
}

TEST(TannerGraph, EdgesMatchNonzeroEntries) {
  const BBCodeSpec& code = find_code_preset("[[72,12,6]]");
  const CheckMatrices h = build_check_matrices(code);
  const TannerGraph tg = tanner_graph(h);
  const int half = code.shape.size();
  for (const TannerEdge& e : tg.edges) {
    const int col = (e.data.kind == QubitKind::L ? 0 : half) + e.data.index;
    const BinaryMatrix& m = e.check.kind == QubitKind::X ? h.hx : h.hz;
    EXPECT_TRUE(m.get(e.check.index, col));
  }
}

TEST(CodeDefinition, Validation) {
  EXPECT_THROW(make_code("bad", 6, 6, {"x3", "y", "y2"}, {"y3", "x", "x2"}, 70, 12, 6), std::invalid_argument);
  EXPECT_THROW(make_code("dup", 6, 6, {"x3", "x3", "y2"}, {"y3", "x", "x2"}, 72, 12, 6), std::invalid_argument);
  EXPECT_NO_THROW(make_code("ok", 6, 6, {"x3", "y", "y2"}, {"y3", "x", "x2"}, 72, 12, 6));
}

TEST(CodeDefinition, PresetLookup) {
  EXPECT_EQ(find_code_preset("144").name, "[[144,12,12]]");
  EXPECT_EQ(find_code_preset("[[90,8,10]]").shape, (GroupShape{15, 3}));
  EXPECT_THROW(find_code_preset("[[7,1,3]]"), std::out_of_range);
}
