#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "opfree/rng.hpp"

using opfree::Rng;
using opfree::Seed;

TEST(Rng, SameSeedSameStream) {
  Rng a(Seed{42}), b(Seed{42});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DifferentSeedsDiffer) {
  Rng a(Seed{1}), b(Seed{2});
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(Rng, SplitIsDeterministicAndDistinct) {
  const Seed s{7};
  EXPECT_EQ(s.split(3), s.split(3));
  std::set<std::uint64_t> children;
  for (std::uint64_t k = 0; k < 1000; ++k) children.insert(s.split(k).value);
  EXPECT_EQ(children.size(), 1000u);
}

TEST(Rng, UniformMomentsAndRange) {
  Rng r(Seed{3});
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5e-3);
  EXPECT_NEAR(sq / n - 0.25, 1.0 / 12.0, 5e-3);
}

TEST(Rng, UniformIntCoversInclusiveRange) {
  Rng r(Seed{4});
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform_int(3, 7);
    ASSERT_GE(v, 3u);
    ASSERT_LE(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(Rng, NormalMoments) {
  Rng r(Seed{5});
  const int n = 200000;
  double sum = 0.0, sq = 0.0, quart = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
    quart += z * z * z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 1e-2);
  EXPECT_NEAR(sq / n, 1.0, 1.5e-2);
  EXPECT_NEAR(quart / n, 3.0, 0.1);
}

TEST(Rng, GaussianMatrixReproducible) {
  Rng a(Seed{9}), b(Seed{9});
  EXPECT_EQ(opfree::gaussian_matrix(5, 4, a), opfree::gaussian_matrix(5, 4, b));
}
