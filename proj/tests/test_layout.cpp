#include <gtest/gtest.h>

#include <random>
#include <set>

#include "bbqec/layout.hpp"
#include "bbqec/matching.hpp"

using namespace bbqec;

namespace {

const BBCodeSpec& code144() { return find_code_preset("[[144,12,12]]"); }
const BBCodeSpec& code72() { return find_code_preset("[[72,12,6]]"); }

Placement folded_data(const BBCodeSpec& code) { return fold(initial_placement(*layout_seed_preset(code), code.shape)); }

}  // namespace

TEST(LayoutSeed, ReferenceSeedsAreValid) {
  const GroupShape g = code144().shape;
  const LayoutSeed s = *layout_seed_preset(code144());
  EXPECT_TRUE(validate_seed(s, g));
  EXPECT_EQ(order(s.l1, g), 6);
  EXPECT_EQ(order(s.l2, g), 12);
  for (const BBCodeSpec& code : code_presets()) EXPECT_TRUE(validate_seed(*layout_seed_preset(code), code.shape));
}

TEST(LayoutSeed, IdentityGeneratorsAreInvalid) {
  const GroupShape g{12, 6};
  const Monomial e = Monomial::identity();
  EXPECT_FALSE(validate_seed({e, e, e, e, e}, g));
}

TEST(LayoutSeed, OrderMismatchIsInvalid) {
  const GroupShape g{12, 6};
  // <x, y> = M, but R1 = y has a different order than L1 = x.
  EXPECT_FALSE(validate_seed({{1, 0}, {0, 1}, {0, 1}, {1, 0}, {0, 0}}, g));
  EXPECT_TRUE(validate_seed({{1, 0}, {0, 1}, {1, 0}, {0, 1}, {0, 0}}, g));
}

TEST(InitialPlacement, LabelsAtOrigin) {
  const GroupShape g = code144().shape;
  const LayoutSeed s = *layout_seed_preset(code144());
  const Placement p = initial_placement(s, g);
  EXPECT_EQ(p.position({QubitKind::L, 0}), (Coord{0, 0}));
  EXPECT_EQ(p.position({QubitKind::R, index_of(s.lr, g)}), (Coord{1, 1}));
  EXPECT_EQ(p.grid_rows(), 12);
  EXPECT_EQ(p.grid_cols(), 24);
  for (int i = 0; i < g.size(); ++i) {
    EXPECT_TRUE(p.placed({QubitKind::L, i}));
    EXPECT_TRUE(p.placed({QubitKind::R, i}));
    EXPECT_FALSE(p.placed({QubitKind::X, i}));
  }
}

TEST(InitialPlacement, RejectsInvalidSeed) {
  const Monomial e = Monomial::identity();
  EXPECT_THROW(initial_placement({e, e, e, e, e}, {12, 6}), std::invalid_argument);
}

TEST(Fold, AxisOfFour) {
  EXPECT_EQ(fold_coordinate(0, 4), 0);
  EXPECT_EQ(fold_coordinate(1, 4), 2);
  EXPECT_EQ(fold_coordinate(2, 4), 3);
  EXPECT_EQ(fold_coordinate(3, 4), 1);
}

TEST(Fold, AxisOfOneIsIdentity) { EXPECT_EQ(fold_coordinate(0, 1), 0); }

TEST(Fold, BijectiveOnRandomAxes) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> len(1, 200);
  for (int t = 0; t < 200; ++t) {
    const int n = len(rng);
    std::set<int> image;
    for (int c = 0; c < n; ++c) {
      const int f = fold_coordinate(c, n);
      ASSERT_GE(f, 0);
      ASSERT_LT(f, n);
      image.insert(f);
    }
    EXPECT_EQ(static_cast<int>(image.size()), n);
  }
}

TEST(Fold, TorusNeighboursEndUpWithinTwo) {
  for (int n = 2; n <= 40; ++n)
    for (int c = 0; c < n; ++c)
      EXPECT_LE(std::abs(fold_coordinate(c, n) - fold_coordinate((c + 1) % n, n)), 2) << n << " " << c;
}

TEST(Fold, AxisOrderDoesNotMatter) {
  const Placement in = initial_placement(*layout_seed_preset(code72()), code72().shape);
  const Placement both = fold(in);
  Placement rows_first(in.grid_rows(), in.grid_cols(), in.half());
  Placement cols_first(in.grid_rows(), in.grid_cols(), in.half());
  for (int s = 0; s < 4 * in.half(); ++s) {
    const QubitId q = in.qubit_at_slot(s);
    if (!in.placed(q)) continue;
    const Coord c = in.position(q);
    const Coord r{fold_coordinate(c.row, in.grid_rows()), c.col};
    rows_first.place(q, {r.row, fold_coordinate(r.col, in.grid_cols())});
    const Coord k{c.row, fold_coordinate(c.col, in.grid_cols())};
    cols_first.place(q, {fold_coordinate(k.row, in.grid_rows()), k.col});
  }
  EXPECT_EQ(rows_first, cols_first);
  EXPECT_EQ(rows_first, both);
}

TEST(CandidateDistances, TwoByTwo) {
  EXPECT_EQ(candidate_squared_distances(2, 2), (std::vector<long long>{1, 2}));
}

TEST(CandidateDistances, ContainsSeven21OnTwelveByTwentyFour) {
  const auto d2 = candidate_squared_distances(12, 24);
  EXPECT_NE(std::find(d2.begin(), d2.end(), 52), d2.end());
  EXPECT_TRUE(std::is_sorted(d2.begin(), d2.end()));
  EXPECT_EQ(std::adjacent_find(d2.begin(), d2.end()), d2.end());
  const auto d = candidate_distances(12, 24);
  EXPECT_TRUE(std::adjacent_find(d.begin(), d.end(), std::greater_equal<>()) == d.end());
}

TEST(HopcroftKarp, SmallGraphs) {
  const std::vector<std::vector<int>> single{{0}}, crossed{{0}, {0, 1}}, starved_adj{{0}, {0}};
  HopcroftKarp one(single, 1);
  EXPECT_EQ(one.solve(), 1);
  // Left 0 and 1 both want right 0; left 1 can also take right 1.
  HopcroftKarp aug(crossed, 2);
  EXPECT_EQ(aug.solve(), 2);
  EXPECT_EQ(aug.match_left()[0], 0);
  EXPECT_EQ(aug.match_left()[1], 1);
  HopcroftKarp starved(starved_adj, 2);
  EXPECT_EQ(starved.solve(), 1);
}

TEST(MinCostAssignment, PicksCheapestPermutation) {
  const std::vector<double> cost{4, 1, 3,  //
                                 2, 0, 5,  //
                                 3, 2, 2};
  const auto a = min_cost_assignment(cost, 3);
  EXPECT_EQ(a, (std::vector<int>{1, 0, 2}));
}

TEST(PlaceAncillas, Canonical144At7_21AndNotBelow) {
  const Placement data = folded_data(code144());
  const TannerGraph tg = tanner_graph(code144());
  const auto at = place_ancillas(data, tg, 52);
  ASSERT_TRUE(at.has_value());
  EXPECT_TRUE(at->is_complete());
  EXPECT_LE(max_edge_squared_distance(*at, tg), 52);
  // 50 is the next smaller candidate.
  const auto d2 = candidate_squared_distances(12, 24);
  const auto it = std::find(d2.begin(), d2.end(), 52);
  EXPECT_EQ(*(it - 1), 50);
  EXPECT_FALSE(place_ancillas(data, tg, 50).has_value());
}

TEST(PlaceAncillas, FeasibilityIsMonotone) {
  const Placement data = folded_data(code72());
  const TannerGraph tg = tanner_graph(code72());
  bool seen_feasible = false;
  for (long long d2 : candidate_squared_distances(data.grid_rows(), data.grid_cols())) {
    const auto p = place_ancillas(data, tg, d2);
    if (seen_feasible) EXPECT_TRUE(p.has_value()) << d2;
    if (p) {
      seen_feasible = true;
      EXPECT_LE(max_edge_squared_distance(*p, tg), d2);
    }
  }
  EXPECT_TRUE(seen_feasible);
}

TEST(MinimizeDmax, ReferenceSeeds) {
  const std::vector<std::pair<std::string, long long>> expect{
      {"[[72,12,6]]", 25}, {"[[90,8,10]]", 100}, {"[[108,8,10]]", 49}, {"[[144,12,12]]", 52}};
  for (const auto& [name, d2] : expect) {
    const BBCodeSpec& code = find_code_preset(name);
    const TannerGraph tg = tanner_graph(code);
    const LayoutResult r = minimize_dmax(folded_data(code), tg);
    EXPECT_EQ(r.dmax_squared, d2) << name;
    EXPECT_EQ(max_edge_squared_distance(r.placement, tg), d2) << name;
  }
}

TEST(MinimizeDmax, SingleCheckSingleSite) {
  // One data pair and one check pair on a 2x2 grid: the checks take the two
  // free sites, each at distance 1 from its data neighbour.
  Placement data(2, 2, 1);
  data.place({QubitKind::L, 0}, {0, 0});
  data.place({QubitKind::R, 0}, {1, 1});
  TannerGraph tg;
  tg.half = 1;
  tg.edges = {{{QubitKind::X, 0}, {QubitKind::L, 0}}, {{QubitKind::Z, 0}, {QubitKind::R, 0}}};
  tg.check_neighbors = {{{QubitKind::L, 0}}, {{QubitKind::R, 0}}};
  const LayoutResult r = minimize_dmax(data, tg);
  EXPECT_EQ(r.dmax_squared, 1);
  EXPECT_TRUE(r.placement.is_complete());
}

TEST(Refine, KeepsDmaxAndCompleteness) {
  const Placement data = folded_data(code144());
  const TannerGraph tg = tanner_graph(code144());
  const auto first = place_ancillas(data, tg, 52);
  ASSERT_TRUE(first);
  const Placement refined = refine_placement(*first, tg, 52);
  EXPECT_TRUE(refined.is_complete());
  EXPECT_LE(max_edge_squared_distance(refined, tg), 52);
}

TEST(Histogram, Canonical144) {
  const TannerGraph tg = tanner_graph(code144());
  const LayoutResult r = layout_from_seed(*layout_seed_preset(code144()), code144(), tg);
  const DistanceHistogram h = distance_histogram(r.placement, tg);
  ASSERT_EQ(h.entries.size(), 17u);
  const std::vector<int> expect{80, 4, 88, 16, 12, 12, 56, 112, 24, 4, 8, 112, 48, 16, 52, 4, 216};
  std::vector<int> got;
  for (const auto& e : h.entries) got.push_back(e.count);
  EXPECT_EQ(got, expect);
  EXPECT_EQ(h.total(), 864);
  EXPECT_EQ(h.entries.front().d2, 1);
  EXPECT_EQ(h.entries.back().d2, 52);
}

TEST(Histogram, SingleEdge) {
  Placement p(1, 2, 1);
  p.place({QubitKind::X, 0}, {0, 0});
  p.place({QubitKind::L, 0}, {0, 1});
  TannerGraph tg;
  tg.half = 1;
  tg.edges = {{{QubitKind::X, 0}, {QubitKind::L, 0}}};
  const DistanceHistogram h = distance_histogram(p, tg);
  ASSERT_EQ(h.entries.size(), 1u);
  EXPECT_EQ(h.entries[0].d2, 1);
  EXPECT_EQ(h.entries[0].count, 1);
}

TEST(ColumnMajor, ReferenceLayoutHasDmax21) {
  const GroupShape g = code144().shape;
  const Placement p = labeled_check_placement(column_major_seed(g), g);
  EXPECT_TRUE(p.is_complete());
  EXPECT_EQ(max_edge_squared_distance(p, tanner_graph(code144())), 441);
}

TEST(Search, RestrictedSmallCodes) {
  SearchPolicy pol;
  pol.r_search = RSearch::Restricted;
  const SearchResult r72 = search_layouts(code72(), pol);
  EXPECT_EQ(r72.layout.dmax_squared, 25);
  EXPECT_TRUE(r72.complete);
  EXPECT_EQ(r72.seeds_evaluated, r72.seeds_total);
  EXPECT_TRUE(validate_seed(r72.seed, code72().shape));
  EXPECT_EQ(search_layouts(find_code_preset("[[90,8,10]]"), pol).layout.dmax_squared, 100);
  EXPECT_EQ(search_layouts(find_code_preset("[[108,8,10]]"), pol).layout.dmax_squared, 49);
}

TEST(Search, Restricted144) {
  SearchPolicy pol;
  pol.r_search = RSearch::Restricted;
  EXPECT_EQ(search_layouts(code144(), pol).layout.dmax_squared, 52);
}

TEST(Search, IndependentOfWorkerCount) {
  SearchPolicy one;
  one.r_search = RSearch::Restricted;
  SearchPolicy two = one;
  two.jobs = 2;
  const SearchResult a = search_layouts(code72(), one), b = search_layouts(code72(), two);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.layout.placement, b.layout.placement);
}

TEST(Search, RestrictedSeedCountAndMembership) {
  const auto seeds = enumerate_seeds(code72().shape, true);
  EXPECT_EQ(seeds.size(), 41472u);
  EXPECT_TRUE(std::is_sorted(seeds.begin(), seeds.end()));
  EXPECT_TRUE(std::binary_search(seeds.begin(), seeds.end(), *layout_seed_preset(code72())));
}

TEST(Search, BudgetStopsEarly) {
  SearchPolicy pol;
  pol.r_search = RSearch::Full;
  pol.time_budget_secs = 0.2;
  const SearchResult r = search_layouts(code72(), pol);
  EXPECT_FALSE(r.complete);
  EXPECT_LT(r.seeds_evaluated, r.seeds_total);
  EXPECT_GT(r.layout.dmax_squared, 0);
}
