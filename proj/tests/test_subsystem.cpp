#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "affdim/subsystem.hpp"
#include "support.hpp"

namespace affdim {
namespace {

using test::dmap;
using test::q;

BigInt factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<unsigned long>(i);
  return f;
}

// Every pair of unit-square images is separated on x or on y, checked
// directly from the translations.
bool pairwise_disjoint_oracle(const HomogeneousSystem& s) {
  const Rational a = s.common_alpha.abs();
  const Rational b = s.common_beta.abs();
  auto lo = [](const Rational& ratio, const Rational& t) { return ratio.sign() < 0 ? t + ratio : t; };
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const Rational xi = lo(s.common_alpha, s.translations[i].x);
      const Rational xj = lo(s.common_alpha, s.translations[j].x);
      const Rational yi = lo(s.common_beta, s.translations[i].y);
      const Rational yj = lo(s.common_beta, s.translations[j].y);
      const bool x_apart = xi + a < xj || xj + a < xi;
      const bool y_apart = yi + b < yj || yj + b < yi;
      if (!x_apart && !y_apart) return false;
    }
  }
  return true;
}

HomogeneousSystem literal_system(const Rational& a, const Rational& b, std::vector<Translation> t) {
  HomogeneousSystem s;
  s.common_alpha = a;
  s.common_beta = b;
  s.translations = std::move(t);
  s.k = 1;
  s.root = homogeneous_root(BigInt(static_cast<unsigned long>(s.size())), a, b);
  return s;
}

TEST(TypicalCounts, Examples) {
  EXPECT_EQ(typical_counts(WeightVector({0.5, 0.5}), 4), (std::vector<std::size_t>{2, 2}));
  EXPECT_EQ(typical_counts(WeightVector({0.5, 0.5}), 5), (std::vector<std::size_t>{3, 2}));
  EXPECT_EQ(typical_counts(WeightVector::uniform(3), 4), (std::vector<std::size_t>{2, 1, 1}));
}

TEST(TypicalCounts, WithinOneOfExpectation) {
  test::Random rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = static_cast<std::size_t>(rng.integer(1, 6));
    std::vector<double> p(m);
    double sum = 0;
    for (auto& v : p) sum += v = static_cast<double>(rng.integer(1, 100));
    for (auto& v : p) v /= sum;
    double fix = 1.0;
    for (std::size_t i = 0; i + 1 < m; ++i) fix -= p[i];
    p[m - 1] = fix;
    const WeightVector w(p);
    const auto k = static_cast<std::size_t>(rng.integer(1, 40));
    const auto v = typical_counts(w, k);
    std::size_t total = 0;
    for (std::size_t i = 0; i < m; ++i) {
      total += v[i];
      EXPECT_LT(std::fabs(static_cast<double>(v[i]) - static_cast<double>(k) * w[i]), 1.0);
    }
    EXPECT_EQ(total, k);
  }
}

TEST(TypicalWords, Examples) {
  auto set = typical_words(WeightVector({0.5, 0.5}), 4);
  EXPECT_EQ(set.words.size(), 6u);
  EXPECT_EQ(set.cardinality, 6);
  EXPECT_EQ(set.words.front(), (Word{1, 1, 2, 2}));
  EXPECT_EQ(set.words.back(), (Word{2, 2, 1, 1}));

  set = typical_words(WeightVector({1.0}), 3);
  EXPECT_EQ(set.words, (std::vector<Word>{{1, 1, 1}}));

  set = typical_words(WeightVector({0.5, 0.5}), 2);
  EXPECT_EQ(set.words, (std::vector<Word>{{1, 2}, {2, 1}}));
  EXPECT_EQ(set.cardinality, 2);
}

TEST(TypicalWords, MatchesFilteredEnumeration) {
  test::Random rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = static_cast<std::size_t>(rng.integer(1, 3));
    const auto k = static_cast<std::size_t>(rng.integer(1, 12 / m + 1));
    std::vector<double> p(m, 1.0 / static_cast<double>(m));
    const WeightVector w(p);
    const auto set = typical_words(w, k);
    std::vector<Word> expected;
    for (const auto& word : test::all_words(m, k)) {
      std::vector<std::size_t> c(m, 0);
      for (Letter l : word) ++c[l - 1];
      if (c == set.counts) expected.push_back(word);
    }
    EXPECT_EQ(set.words, expected);
  }
}

TEST(TypicalWords, MultinomialIdentity) {
  test::Random rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = static_cast<std::size_t>(rng.integer(1, 5));
    std::vector<double> p(m);
    double sum = 0;
    for (auto& v : p) sum += v = static_cast<double>(rng.integer(1, 20));
    for (auto& v : p) v /= sum;
    const auto k = static_cast<std::size_t>(rng.integer(1, 12));
    const auto set = typical_words(WeightVector(p), k);
    BigInt denom = 1;
    for (auto c : set.counts) denom *= factorial(c);
    EXPECT_EQ(set.cardinality, factorial(k) / denom);
    EXPECT_EQ(BigInt(static_cast<unsigned long>(set.words.size())), set.cardinality);
  }
}

TEST(TypicalWords, Budget) {
  EXPECT_THROW(typical_words(WeightVector::uniform(3), 18, 1000), BudgetExceeded);
}

TEST(HomogeneousSubsystem, SingleMap) {
  const DiagonalIFS one({dmap(q(1, 2), q(1, 3), q(1, 4), q(0))});
  const auto s = homogeneous_subsystem(one, 5);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s.root, 0.0);
  EXPECT_EQ(s.common_alpha, q(1, 32));
}

TEST(HomogeneousSubsystem, DepthSixExample) {
  const auto s = homogeneous_subsystem(test::anisotropic_example(), 6);
  EXPECT_EQ(s.size(), 90u);
  EXPECT_EQ(s.common_alpha, q(1, 64));
  EXPECT_EQ(s.common_beta, q(1, 729));
  const double t1 = std::log(90.0) / (6 * std::log(2.0));
  const double t2 = 1.0 + std::log(90.0 / 64.0) / (6 * std::log(3.0));
  EXPECT_NEAR(t1, 1.0820, 1e-4);
  EXPECT_NEAR(t2, 1.0517, 1e-4);
  EXPECT_NEAR(s.root, std::min(t1, t2), 1e-12);
}

TEST(HomogeneousSubsystem, ExplicitWeights) {
  const auto ifs = test::homogeneous(q(1, 2), q(1, 3), {{q(0), q(0)}, {q(1, 2), q(2, 3)}});
  const auto s = homogeneous_subsystem(ifs, 2, WeightVector({0.5, 0.5}));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.common_alpha, q(1, 4));
  EXPECT_EQ(s.common_beta, q(1, 9));
  EXPECT_THROW(homogeneous_subsystem(ifs, 2, WeightVector({1.0})), ValidationError);
}

TEST(HomogeneousSubsystem, EveryMapIsAGenuineComposition) {
  test::Random rng(44);
  for (int trial = 0; trial < 60; ++trial) {
    const auto ifs = rng.system(static_cast<std::size_t>(rng.integer(1, 4)));
    const auto k = static_cast<std::size_t>(rng.integer(1, 8));
    const auto s = homogeneous_subsystem(ifs, k);
    const auto counts = typical_counts(natural_weights(ifs), k);
    Rational a = 1, b = 1;
    for (std::size_t l = 0; l < counts.size(); ++l) {
      for (std::size_t j = 0; j < counts[l]; ++j) {
        a *= ifs[l].alpha;
        b *= ifs[l].beta;
      }
    }
    EXPECT_EQ(s.common_alpha, a);
    EXPECT_EQ(s.common_beta, b);
    ASSERT_EQ(s.source_words.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto c = compose(s.source_words[i], ifs);
      EXPECT_EQ(c.alpha, a);
      EXPECT_EQ(c.beta, b);
      EXPECT_EQ(c.tx, s.translations[i].x);
      EXPECT_EQ(c.ty, s.translations[i].y);
    }
  }
}

TEST(HomogeneousRoot, EqualsMinOfBranchRootsAndBisection) {
  test::Random rng(45);
  for (int trial = 0; trial < 300; ++trial) {
    const Rational a = rng.contraction(30);
    const Rational b = rng.contraction(30);
    const auto n = static_cast<unsigned long>(rng.integer(2, 400));
    const double la = std::log(std::fabs(a.to_double()));
    const double lb = std::log(std::fabs(b.to_double()));
    const double ln = std::log(static_cast<double>(n));
    // Direct bisection on t -> min{N a^t, N a b^(t-1)}.
    const double direct = test::oracle_root(
        [&](double t) { return std::min(std::exp(ln + t * la), std::exp(ln + la + (t - 1) * lb)); }, 0.0, 200.0);
    const auto br = homogeneous_branch_roots(ln, la, lb);
    EXPECT_NEAR(std::min(br.t1, br.t2), direct, 1e-9);
    if (std::fabs(la) <= std::fabs(lb)) {
      // With |alpha| >= |beta| the general root agrees with the two-branch
      // form whenever it lands below 2.
      const double t = homogeneous_root(BigInt(n), a, b);
      if (t < 2.0) {
        EXPECT_NEAR(t, direct, 1e-9);
      }
    }
  }
}

TEST(HomogeneousRoot, MatchesAffinityDimension) {
  test::Random rng(46);
  for (int trial = 0; trial < 200; ++trial) {
    const Rational a = rng.contraction(9);
    const Rational b = rng.contraction(9);
    const auto m = static_cast<std::size_t>(rng.integer(2, 9));
    std::vector<std::pair<Rational, Rational>> t(m, {q(0), q(0)});
    const auto ifs = test::homogeneous(a, b, t);
    EXPECT_NEAR(homogeneous_root(BigInt(static_cast<unsigned long>(m)), a, b), affinity_dimension(ifs), 1e-10);
  }
}

TEST(SscThin, TouchingPairKeepsOne) {
  const auto s = literal_system(q(1, 2), q(1, 2), {{q(0), q(0)}, {q(1, 2), q(1, 2)}});
  const auto r = ssc_thin(s);
  EXPECT_EQ(r.system.size(), 1u);
  EXPECT_TRUE(r.ssc_certified);
  EXPECT_DOUBLE_EQ(r.achieved_dimension, 0.0);
}

TEST(SscThin, SeparatedPairKept) {
  const auto s = literal_system(q(1, 4), q(1, 4), {{q(0), q(0)}, {q(1, 2), q(0)}});
  const auto r = ssc_thin(s);
  EXPECT_EQ(r.system.size(), 2u);
  EXPECT_TRUE(r.ssc_certified);
  EXPECT_NEAR(r.achieved_dimension, 0.5, 1e-12);
}

TEST(SscThin, DuplicatesCollapse) {
  const auto s = literal_system(q(1, 4), q(1, 4), {{q(1, 8), q(0)}, {q(1, 8), q(0)}, {q(1, 8), q(0)}});
  const auto r = ssc_thin(s);
  EXPECT_EQ(r.system.size(), 1u);
}

TEST(SscThin, FallsBackToYAxis) {
  // Four distinct but mutually overlapping x-intervals: the x sweep keeps
  // one, below half of four, so the y sweep runs and keeps all four.
  const auto s = literal_system(q(1, 2), q(1, 8),
                                {{q(0), q(0)}, {q(1, 8), q(1, 4)}, {q(1, 4), q(1, 2)}, {q(3, 8), q(3, 4)}});
  const auto r = ssc_thin(s);
  EXPECT_EQ(r.system.size(), 4u);
  EXPECT_TRUE(r.ssc_certified);

  // Identical x-intervals count once, so the y sweep is not triggered.
  const auto same = literal_system(q(1, 2), q(1, 5), {{q(0), q(0)}, {q(0), q(2, 5)}, {q(0), q(4, 5)}});
  EXPECT_EQ(ssc_thin(same).system.size(), 1u);
}

TEST(SscThin, NegativeRatiosUseOrderedEndpoints) {
  const auto s = literal_system(q(-1, 4), q(1, 4), {{q(1, 4), q(0)}, {q(3, 4), q(0)}});
  const auto r = ssc_thin(s);
  EXPECT_EQ(r.system.size(), 2u);
  EXPECT_TRUE(pairwise_disjoint_oracle(r.system));
}

TEST(SscThin, CertificateSoundOnRandomSystems) {
  test::Random rng(47);
  int certified = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto ifs = rng.system(static_cast<std::size_t>(rng.integer(2, 4)));
    const auto k = static_cast<std::size_t>(rng.integer(1, 6));
    const auto parent = homogeneous_subsystem(ifs, k);
    const auto r = ssc_thin(parent);
    EXPECT_TRUE(r.ssc_certified);
    if (!r.ssc_certified) continue;
    ++certified;
    EXPECT_TRUE(pairwise_disjoint_oracle(r.system));
    EXPECT_LE(r.achieved_dimension, r.target_dimension + 1e-9);
    // Subset of the parent, with re-composable words.
    std::set<std::pair<std::string, std::string>> parent_t;
    for (const auto& t : parent.translations) parent_t.insert({t.x.to_string(), t.y.to_string()});
    for (std::size_t i = 0; i < r.system.size(); ++i) {
      const auto& t = r.system.translations[i];
      EXPECT_TRUE(parent_t.count({t.x.to_string(), t.y.to_string()}));
      const auto c = compose(r.system.source_words[i], ifs);
      EXPECT_EQ(c.tx, t.x);
      EXPECT_EQ(c.ty, t.y);
    }
  }
  EXPECT_EQ(certified, 100);
}

TEST(ApproximateSubsystem, SingleMap) {
  const DiagonalIFS one({dmap(q(1, 2), q(1, 3), q(0), q(0))});
  const auto r = approximate_subsystem(one, 0.1, 4);
  EXPECT_EQ(r.system.size(), 1u);
  EXPECT_DOUBLE_EQ(r.target_dimension, 0.0);
  EXPECT_DOUBLE_EQ(r.achieved_dimension, 0.0);
  EXPECT_TRUE(r.target_reached);
}

TEST(ApproximateSubsystem, SeparatedQuarterSystem) {
  const auto ifs = test::homogeneous(q(1, 4), q(1, 4), {{q(0), q(0)}, {q(1, 2), q(1, 2)}});
  const auto r = approximate_subsystem(ifs, 0.2, 8);
  EXPECT_NEAR(r.target_dimension, 0.5, 1e-12);
  EXPECT_TRUE(r.target_reached);
  EXPECT_TRUE(r.ssc_certified);
  // Typical words of length k use each letter k/2 times, so the first depth
  // with enough of them is k = 4: C(4,2) = 6 maps of ratio 1/256.
  EXPECT_EQ(r.iterate_depth_total, 4u);
  EXPECT_EQ(r.system.size(), 6u);
  EXPECT_NEAR(r.achieved_dimension, std::log(6.0) / std::log(256.0), 1e-12);
  EXPECT_GE(r.achieved_dimension, 0.3);
}

TEST(ApproximateSubsystem, AnisotropicExampleImprovesWithDepth) {
  const auto ifs = test::anisotropic_example();
  const double target = 1.0 + std::log(1.5) / std::log(3.0);
  const auto r = approximate_subsystem(ifs, 0.35, 12);
  EXPECT_NEAR(r.target_dimension, target, 1e-12);
  EXPECT_TRUE(r.ssc_certified);
  EXPECT_TRUE(pairwise_disjoint_oracle(r.system));
  EXPECT_LE(r.achieved_dimension, r.target_dimension + 1e-9);

  double prev = 0.0;
  for (std::size_t k = 3; k <= 12; k += 3) {
    const double t = homogeneous_subsystem(ifs, k).root;
    EXPECT_GE(t, prev - 1e-9);
    prev = t;
  }
}

TEST(ApproximateSubsystem, Validation) {
  EXPECT_THROW(approximate_subsystem(test::anisotropic_example(), 0.0, 4), ValidationError);
  EXPECT_THROW(approximate_subsystem(test::anisotropic_example(), 0.1, 0), ValidationError);
}

TEST(ApproximateSubsystem, BudgetFlag) {
  const auto r = approximate_subsystem(test::anisotropic_example(), 0.01, 12, 2000);
  EXPECT_TRUE(r.budget_exhausted);
  EXPECT_FALSE(r.target_reached);
}

}  // namespace
}  // namespace affdim
