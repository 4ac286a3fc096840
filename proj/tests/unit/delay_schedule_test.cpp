#include "dumbbell/delay_schedule.hpp"

#include <gtest/gtest.h>

namespace dumbbell {
namespace {

using namespace std::chrono_literals;

RunParams square(Duration step, std::uint64_t seed) {
  RunParams p;
  p.base = Duration::zero();
  p.step = step;
  p.max_delay = p.base + p.step;
  p.delta = 150ms;
  p.runtime = 10;
  p.seed = seed;
  return p;
}

TEST(DelaySchedule, SquareWaveIndependentOfSeed) {
  for (const std::uint64_t seed : {0ull, 1ull, 3ull, 0xdeadbeefull}) {
    const auto s = generate_delay_schedule(square(140ms, seed));
    ASSERT_EQ(s.values.size(), 67u);  // ceil(10 s / 150 ms)
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      EXPECT_EQ(s.values[k], k % 2 == 0 ? 0ms : 140ms) << "seed " << seed << " k " << k;
    }
  }
}

TEST(DelaySchedule, DeltaBeyondRuntimeIsConstant) {
  RunParams p;
  p.base = 8ms;
  p.step = 5ms;
  p.delta = 100s;
  p.runtime = 10;
  const auto s = generate_delay_schedule(p);
  ASSERT_EQ(s.values.size(), 1u);
  EXPECT_EQ(s.values[0], 8ms);
  EXPECT_EQ(s.at(9s), 8ms);
}

TEST(DelaySchedule, DeterministicAndBounded) {
  RunParams p;
  p.base = 30ms;
  p.step = 10ms;
  p.delta = 50ms;
  p.max_delay = 100s;
  p.runtime = 60;
  p.seed = 42;
  const auto a = generate_delay_schedule(p);
  const auto b = generate_delay_schedule(p);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.values.front(), 30ms);
  for (std::size_t k = 1; k < a.values.size(); ++k) {
    const auto diff = a.values[k] - a.values[k - 1];
    EXPECT_TRUE(diff == 10ms || diff == -10ms);
    EXPECT_GE(a.values[k], Duration::zero());
  }
  p.seed = 43;
  EXPECT_NE(generate_delay_schedule(p).values, a.values);
}

TEST(DelaySchedule, ClampsAtBothBounds) {
  RunParams p;
  p.base = 0ms;
  p.step = 30ms;
  p.max_delay = 50ms;  // neither 0+-30 nor 30+-30 always fits
  p.delta = 10ms;
  p.runtime = 5;
  p.seed = 9;
  const auto s = generate_delay_schedule(p);
  for (const auto v : s.values) {
    EXPECT_GE(v, 0ms);
    EXPECT_LE(v, 50ms);
  }
}

TEST(DelaySchedule, AtSelectsInterval) {
  const auto s = generate_delay_schedule(square(140ms, 1));
  EXPECT_EQ(s.at(0ms), 0ms);
  EXPECT_EQ(s.at(149ms), 0ms);
  EXPECT_EQ(s.at(150ms), 140ms);
  EXPECT_EQ(s.at(310ms), 0ms);
  EXPECT_EQ(s.at(1000s), s.values.back());
}

}  // namespace
}  // namespace dumbbell
