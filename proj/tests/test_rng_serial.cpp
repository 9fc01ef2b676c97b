#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>

#include "ave/rng.hpp"
#include "ave/serial.hpp"

namespace ave {
namespace {

TEST(SeededRng, SameSeedSameStream) {
  SeededRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(SeededRng, DifferentSeedsDiverge) {
  SeededRng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
  EXPECT_EQ(equal, 0);
}

TEST(SeededRng, ForkDoesNotAdvanceParent) {
  SeededRng a(7), b(7);
  const SeededRng child = a.fork(3);
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(child.seed(), derive_seed(7, 3));
  EXPECT_NE(a.fork(3).seed(), a.fork(4).seed());
}

TEST(SeededRng, UniformInUnitInterval) {
  SeededRng r(5);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1.0 - 1e-3);
}

TEST(SeededRng, BelowIsUniformWithinThreeSigma) {
  SeededRng r(11);
  constexpr int kBins = 7;
  constexpr int kDraws = 70000;
  std::array<int, kBins> counts{};
  for (int i = 0; i < kDraws; ++i) ++counts[r.below(kBins)];
  const double expected = static_cast<double>(kDraws) / kBins;
  const double sigma = std::sqrt(kDraws * (1.0 / kBins) * (1.0 - 1.0 / kBins));
  for (int c : counts) EXPECT_LT(std::abs(c - expected), 3 * sigma);
}

TEST(SeededRng, BelowOneIsZero) {
  SeededRng r(3);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(r.below(1), 0u);
}

TEST(DeriveSeed, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 64; ++s) seen.insert(derive_seed(9, s));
  EXPECT_EQ(seen.size(), 64u);
}

TEST(Fnv1a64, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(ByteStream, RoundTrip) {
  ByteWriter w;
  w.u8(7);
  w.u32(0xdeadbeef);
  w.i32(-12);
  w.u64(1ULL << 60);
  w.f64(-0.1);
  const Bytes bytes = std::move(w).bytes();
  ASSERT_EQ(bytes.size(), 1u + 4 + 4 + 8 + 8);
  EXPECT_EQ(bytes[1], 0xef);  // little-endian

  ByteReader r(bytes);
  EXPECT_EQ(r.u8(), 7);
  EXPECT_EQ(r.u32(), 0xdeadbeefu);
  EXPECT_EQ(r.i32(), -12);
  EXPECT_EQ(r.u64(), 1ULL << 60);
  EXPECT_EQ(r.f64(), -0.1);
  EXPECT_TRUE(r.done());
  EXPECT_THROW(r.u8(), std::runtime_error);
}

}  // namespace
}  // namespace ave
