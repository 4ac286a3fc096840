#include "dumbbell/metadata.hpp"

#include <chrono>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace dumbbell {
namespace {

using namespace std::chrono_literals;
using testing::TempDir;

RunParams sample_params(const std::string& dir) {
  RunParams p;
  p.base = 30ms;
  p.delta = 500ms;
  p.step = 10ms;
  p.jitter = 5ms;
  p.runtime = 10;
  p.central_rate_mbps = 120;
  p.max_delay = 100s;
  p.seed = 3;
  p.q1 = 500;
  p.q2 = 1000;
  p.output_dir = dir;
  p.sim.capture_loss = 0.01;
  return p;
}

TEST(Metadata, ExplicitSeedIsKept) {
  EXPECT_EQ(resolve_seed(3), 3u);
}

TEST(Metadata, MissingSeedIsWallClockSeconds) {
  const auto before = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
  const std::uint64_t seed = resolve_seed(std::nullopt);
  const auto after = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count());
  EXPECT_GE(seed, before);
  EXPECT_LE(seed, after);
}

TEST(Metadata, SaveThenLoadIsEqual) {
  TempDir dir;
  const auto groups = sorted_by_start(parse_layout(
      "- {scheme: vegas, flows: 2, start: 5, direction: ->, right-delay: 5ms, left-rate: 100.0}\n"
      "- {scheme: cubic, flows: 1, start: 0, direction: <-}\n"));
  const Metadata saved = save_metadata(sample_params((dir / "out").string()), groups);
  EXPECT_EQ(saved.params.seed, 3u);
  const auto path = dir / "out" / kMetadataFileName;
  ASSERT_TRUE(std::filesystem::exists(path));
  const Metadata loaded = load_metadata(path);
  EXPECT_EQ(loaded, saved);
  EXPECT_EQ(loaded.groups[0].scheme, "cubic");
}

TEST(Metadata, JsonRoundTrip) {
  Metadata m;
  m.params = sample_params("dumps");
  m.params.base = Duration{1234567};
  m.groups = default_layout_groups(10);
  EXPECT_EQ(metadata_from_json(metadata_to_json(m)), m);
}

TEST(Metadata, RejectsMalformedDocuments) {
  EXPECT_ANY_THROW(metadata_from_json("{"));
  EXPECT_ANY_THROW(metadata_from_json("{}"));
}

TEST(RunParams, ValidationBounds) {
  RunParams p = sample_params("dumps");
  EXPECT_NO_THROW(validate(p));
  p.runtime = 61;
  EXPECT_THROW(validate(p), ConfigError);
  p.runtime = 0;
  EXPECT_THROW(validate(p), ConfigError);
  p = sample_params("dumps");
  p.delta = 9ms;
  EXPECT_THROW(validate(p), ConfigError);
  p = sample_params("dumps");
  p.max_delay = 20ms;
  EXPECT_THROW(validate(p), ConfigError);  // base 30ms > max
  p = sample_params("dumps");
  p.q2 = 0;
  EXPECT_THROW(validate(p), ConfigError);
}

TEST(RunParams, GroupsMustStartBeforeRuntimeEnds) {
  const RunParams p = sample_params("dumps");
  EXPECT_NO_THROW(validate(p, default_layout_groups(p.runtime)));
  auto groups = default_layout_groups(p.runtime);
  groups[1].start = p.runtime;
  EXPECT_THROW(validate(p, groups), ConfigError);
}

}  // namespace
}  // namespace dumbbell
