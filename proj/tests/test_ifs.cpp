#include <gtest/gtest.h>

#include "affdim/ifs.hpp"
#include "support.hpp"

namespace affdim {
namespace {

using test::dmap;
using test::q;

IFS1D halves_quarter() { return test::line({{q(1, 2), q(0)}, {q(1, 2), q(1, 4)}}); }

TEST(Compose1D, EmptyWordIsIdentity) {
  const auto f = compose_1d({}, halves_quarter());
  EXPECT_EQ(f.ratio, q(1));
  EXPECT_EQ(f.offset, q(0));
}

TEST(Compose1D, OutermostLetterFirst) {
  const auto f12 = compose_1d({1, 2}, halves_quarter());
  EXPECT_EQ(f12.ratio, q(1, 4));
  EXPECT_EQ(f12.offset, q(1, 8));
  const auto f21 = compose_1d({2, 1}, halves_quarter());
  EXPECT_EQ(f21.ratio, q(1, 4));
  EXPECT_EQ(f21.offset, q(1, 4));
}

TEST(Compose1D, RejectsBadLetters) {
  EXPECT_THROW(compose_1d({1, 3}, halves_quarter()), InvalidWord);
  EXPECT_THROW(compose_1d({0}, halves_quarter()), InvalidWord);
}

TEST(Compose1D, MatchesNestedEvaluation) {
  test::Random rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ifs = rng.line_system(static_cast<std::size_t>(rng.integer(1, 4)));
    const auto w = rng.word(static_cast<std::size_t>(rng.integer(0, 8)), ifs.size());
    const auto f = compose_1d(w, ifs);
    const auto [d, x] = test::evaluate_word(ifs, w);
    EXPECT_EQ(f.ratio, d);
    EXPECT_EQ(f.offset, x);
  }
}

TEST(Compose1D, ConcatenationIsComposition) {
  test::Random rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto ifs = rng.line_system(static_cast<std::size_t>(rng.integer(1, 4)));
    const auto u = rng.word(static_cast<std::size_t>(rng.integer(0, 6)), ifs.size());
    const auto v = rng.word(static_cast<std::size_t>(rng.integer(0, 6)), ifs.size());
    Word uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    const auto fu = compose_1d(u, ifs);
    const auto fv = compose_1d(v, ifs);
    const auto fuv = compose_1d(uv, ifs);
    EXPECT_EQ(fuv.ratio, fu.ratio * fv.ratio);
    EXPECT_EQ(fuv.offset, fu.offset + fu.ratio * fv.offset);
  }
}

TEST(CylinderRect, Examples) {
  const DiagonalIFS one({dmap(q(1, 2), q(1, 3), q(0), q(0))});
  const Rect unit{{q(0), q(1)}, {q(0), q(1)}};
  EXPECT_EQ(cylinder_rect({}, one), unit);
  EXPECT_EQ(cylinder_rect({1}, one), (Rect{{q(0), q(1, 2)}, {q(0), q(1, 3)}}));

  const DiagonalIFS flipped({dmap(q(-1, 2), q(1, 3), q(1), q(0))});
  EXPECT_EQ(cylinder_rect({1}, flipped), (Rect{{q(1, 2), q(1)}, {q(0), q(1, 3)}}));
}

TEST(CylinderRect, SidesAreProductsOfRatios) {
  test::Random rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ifs = rng.system(static_cast<std::size_t>(rng.integer(1, 4)));
    const auto w = rng.word(static_cast<std::size_t>(rng.integer(0, 7)), ifs.size());
    Rational px = 1;
    Rational py = 1;
    for (Letter l : w) {
      px *= ifs[l - 1].alpha.abs();
      py *= ifs[l - 1].beta.abs();
    }
    const Rect r = cylinder_rect(w, ifs);
    EXPECT_EQ(r.x.length(), px);
    EXPECT_EQ(r.y.length(), py);
    EXPECT_LE(r.x.lo, r.x.hi);
  }
}

TEST(CylinderRect, NestedInPrefixesForSelfMaps) {
  test::Random rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ifs = rng.self_map_system(static_cast<std::size_t>(rng.integer(1, 4)));
    ASSERT_TRUE(ifs.maps_unit_square_into_itself());
    const auto w = rng.word(static_cast<std::size_t>(rng.integer(1, 7)), ifs.size());
    const Rect leaf = cylinder_rect(w, ifs);
    for (std::size_t len = 0; len < w.size(); ++len) {
      const Word prefix(w.begin(), w.begin() + static_cast<long>(len));
      EXPECT_TRUE(cylinder_rect(prefix, ifs).contains(leaf));
    }
  }
}

TEST(Project, ExtractsComponentsInOrder) {
  const DiagonalIFS ifs({dmap(q(1, 2), q(1, 3), q(0), q(1, 5)), dmap(q(1, 2), q(-1, 4), q(1, 2), q(3, 4))});
  EXPECT_EQ(project(ifs, Axis::x), test::line({{q(1, 2), q(0)}, {q(1, 2), q(1, 2)}}));
  EXPECT_EQ(project(ifs, Axis::y), test::line({{q(1, 3), q(1, 5)}, {q(-1, 4), q(3, 4)}}));
  const DiagonalIFS single({dmap(q(1, 2), q(1, 3), q(0), q(0))});
  EXPECT_EQ(project(single, Axis::x).size(), 1u);
}

TEST(Iterate, DepthOneIsIdentity) {
  const auto ifs = test::anisotropic_example();
  EXPECT_EQ(iterate(ifs, 1), ifs);
}

TEST(Iterate, DepthTwoMatchesCompose) {
  const DiagonalIFS ifs({dmap(q(1, 2), q(1, 3), q(0), q(1, 5)), dmap(q(-1, 3), q(1, 4), q(1, 2), q(0))});
  const auto it = iterate(ifs, 2);
  ASSERT_EQ(it.size(), 4u);
  const std::vector<Word> words{{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  const auto px = project(ifs, Axis::x);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto [d, x] = test::evaluate_word(px, words[i]);
    EXPECT_EQ(it[i].alpha, d);
    EXPECT_EQ(it[i].tx, x);
    EXPECT_EQ(it[i], compose(words[i], ifs));
  }
}

TEST(Iterate, BudgetExceeded) {
  const auto ifs = test::anisotropic_example();
  EXPECT_THROW(iterate(ifs, 13), BudgetExceeded);
  EXPECT_NO_THROW(iterate(ifs, 12));
  EXPECT_THROW(iterate(ifs, 0), ValidationError);
}

TEST(Iterate, ProjectionCommutesWithIteration) {
  test::Random rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ifs = rng.system(static_cast<std::size_t>(rng.integer(1, 3)));
    const std::size_t k = static_cast<std::size_t>(rng.integer(1, 4));
    for (Axis a : {Axis::x, Axis::y}) {
      EXPECT_EQ(project(iterate(ifs, k), a).maps(), iterate_1d(project(ifs, a), k));
    }
  }
}

TEST(Words, IndexRoundTrip) {
  const auto all = test::all_words(3, 4);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(word_from_index(i, 3, 4), all[i]);
}

TEST(Maps, RejectNonContracting) {
  EXPECT_THROW(dmap(q(1), q(1, 2), q(0), q(0)), ValidationError);
  EXPECT_THROW(dmap(q(1, 2), q(0), q(0), q(0)), ValidationError);
  EXPECT_THROW(dmap(q(-3, 2), q(1, 2), q(0), q(0)), ValidationError);
  EXPECT_THROW(DiagonalIFS({}), ValidationError);
}

TEST(Maps, UnitSquareFlag) {
  EXPECT_TRUE(test::anisotropic_example().maps_unit_square_into_itself());
  EXPECT_FALSE(DiagonalIFS({dmap(q(1, 2), q(1, 2), q(3, 4), q(0))}).maps_unit_square_into_itself());
}

}  // namespace
}  // namespace affdim
