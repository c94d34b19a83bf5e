#include <cmath>

#include <gtest/gtest.h>

#include "builders.hpp"
#include "expect_error.hpp"
#include "mim/verification.hpp"
#include "oracles.hpp"

using namespace mim;
using testing_support::coupon_scene;
using testing_support::head_over_center;

namespace {

PodSpec crater_spec(int n, std::uint64_t seed = 1000) {
  PodSpec spec;
  spec.patch_id = "coupon";
  spec.n_trials = n;
  spec.base_seed = seed;
  spec.threads = 1;
  return spec;
}

SensorHead coupon_head(const WarehouseScene& scene, double sigma_mm = 0.02) {
  SensorHead head = head_over_center(scene, "coupon", 2.0);
  head.profilometer.depth_noise_sigma_mm = sigma_mm;
  return head;
}

bool same(const PodResult& a, const PodResult& b) {
  if (a.hits != b.hits || a.trials != b.trials || a.pod_lower_bound != b.pod_lower_bound || a.pass != b.pass ||
      a.records.size() != b.records.size())
    return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.index != y.index || x.seed != y.seed || x.placement_uv != y.placement_uv || x.detected != y.detected ||
        x.nearest_mm != y.nearest_mm)
      return false;
  }
  return true;
}

}  // namespace

TEST(ClopperPearson, ZeroHitsIsZero) {
  for (int n : {1, 5, 29, 200}) EXPECT_EQ(clopper_pearson_lower(0, n, 0.05), 0.0);
}

TEST(ClopperPearson, SingleHitClosedForm) { EXPECT_NEAR(clopper_pearson_lower(1, 1, 0.05), 0.05, 1e-12); }

TEST(ClopperPearson, TwentyNineOfTwentyNine) {
  const double bound = clopper_pearson_lower(29, 29, 0.05);
  EXPECT_NEAR(bound, 0.90186, 1e-4);
  EXPECT_NEAR(bound, std::pow(0.05, 1.0 / 29.0), 1e-12);
  EXPECT_NEAR(bound, oracle::clopper_pearson_lower(29, 29, 0.05), 1e-9);
}

TEST(ClopperPearson, MatchesBisectionOracle) {
  for (int n = 1; n <= 200; n += (n < 40 ? 1 : 7))
    for (int k = 0; k <= n; k += (n < 40 ? 1 : 5)) {
      for (double alpha : {0.05, 0.1}) {
        const double got = clopper_pearson_lower(k, n, alpha);
        EXPECT_NEAR(got, oracle::clopper_pearson_lower(k, n, alpha), 1e-9) << k << "/" << n << " alpha " << alpha;
      }
    }
}

TEST(ClopperPearson, MonotoneInHitsAndTrials) {
  for (int n = 1; n <= 60; ++n)
    for (int k = 1; k <= n; ++k) {
      EXPECT_GE(clopper_pearson_lower(k, n, 0.05), clopper_pearson_lower(k - 1, n, 0.05));
      EXPECT_LE(clopper_pearson_lower(k, n + 1, 0.05), clopper_pearson_lower(k, n, 0.05));
    }
}

TEST(ClopperPearson, InvalidArguments) {
  EXPECT_MIM_ERROR(clopper_pearson_lower(3, 2, 0.05), ErrorCode::InvalidArgument);
  EXPECT_MIM_ERROR(clopper_pearson_lower(-1, 2, 0.05), ErrorCode::InvalidArgument);
  EXPECT_MIM_ERROR(clopper_pearson_lower(1, 0, 0.05), ErrorCode::InvalidArgument);
  EXPECT_MIM_ERROR(clopper_pearson_lower(1, 2, 0.0), ErrorCode::InvalidArgument);
  EXPECT_MIM_ERROR(clopper_pearson_lower(1, 2, 1.0), ErrorCode::InvalidArgument);
}

TEST(BinomialTail, MatchesDirectSum) {
  for (int n : {1, 7, 29, 100})
    for (int k = 0; k <= n; k += 3)
      for (double p : {0.01, 0.3, 0.9, 0.99})
        EXPECT_NEAR(binomial_upper_tail(k, n, p), static_cast<double>(oracle::binomial_tail(k, n, p)), 1e-12);
}

TEST(MinTrials, Examples) {
  EXPECT_EQ(min_trials_zero_failure(0.90, 0.95), static_cast<int>(std::ceil(std::log(0.05) / std::log(0.9))));
  EXPECT_EQ(min_trials_zero_failure(0.90, 0.95), 29);
  EXPECT_EQ(min_trials_zero_failure(0.5, 0.5), 1);
  EXPECT_MIM_ERROR(min_trials_zero_failure(1.0, 0.95), ErrorCode::InvalidArgument);
  EXPECT_MIM_ERROR(min_trials_zero_failure(0.9, 1.0), ErrorCode::InvalidArgument);
}

TEST(MinTrials, IsTheSmallestDemonstratingCount) {
  for (double target : {0.5, 0.8, 0.9, 0.95})
    for (double confidence : {0.8, 0.9, 0.95, 0.99}) {
      const int n = min_trials_zero_failure(target, confidence);
      EXPECT_GE(clopper_pearson_lower(n, n, 1 - confidence), target - 1e-12);
      if (n > 1) EXPECT_LT(clopper_pearson_lower(n - 1, n - 1, 1 - confidence), target);
    }
}

TEST(Summarize, TwentyEightOfTwentyNineFails) {
  const PodResult r = summarize_pod(28, 29);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.pod_lower_bound, 0.90);
  EXPECT_NEAR(r.pod_lower_bound, oracle::clopper_pearson_lower(28, 29, 0.05), 1e-9);
  EXPECT_TRUE(summarize_pod(29, 29).pass);
}

TEST(Campaign, NoiselessCratersAllDetected) {
  const auto scene = coupon_scene(0.05);
  const PodResult r = run_pod_campaign(scene, coupon_head(scene, 0.0), crater_spec(29));
  EXPECT_EQ(r.hits, 29);
  EXPECT_EQ(r.trials, 29);
  EXPECT_NEAR(r.pod_lower_bound, std::pow(0.05, 1.0 / 29.0), 1e-12);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.records.size(), 29u);
  for (int i = 0; i < 29; ++i) {
    EXPECT_EQ(r.records[i].index, i);
    EXPECT_EQ(r.records[i].seed, 1000u + i);
    EXPECT_TRUE(r.records[i].detected);
    EXPECT_LE(r.records[i].nearest_mm, 2.0);
  }
}

TEST(Campaign, PlacementsStayInsetFromEdges) {
  const auto scene = coupon_scene(0.05);
  const PodResult r = run_pod_campaign(scene, coupon_head(scene, 0.0), crater_spec(29, 5));
  const double inset = 0.3e-3;
  for (const auto& t : r.records) {
    EXPECT_GE(t.placement_uv.x(), inset);
    EXPECT_LE(t.placement_uv.x(), 0.05 - inset);
    EXPECT_GE(t.placement_uv.y(), inset);
    EXPECT_LE(t.placement_uv.y(), 0.05 - inset);
  }
}

TEST(Campaign, DegradedDetectorFails) {
  const auto scene = coupon_scene(0.05);
  PodSpec spec = crater_spec(29);
  spec.detector.threshold_scale = 10.0;
  const PodResult r = run_pod_campaign(scene, coupon_head(scene), spec);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.hits, 29);
}

TEST(Campaign, IdenticalSpecIdenticalResult) {
  const auto scene = coupon_scene(0.05);
  const auto head = coupon_head(scene);
  const PodSpec spec = crater_spec(8, 77);
  EXPECT_TRUE(same(run_pod_campaign(scene, head, spec), run_pod_campaign(scene, head, spec)));
}

TEST(Campaign, ThreadCountDoesNotChangeResult) {
  const auto scene = coupon_scene(0.05);
  const auto head = coupon_head(scene);
  PodSpec serial = crater_spec(8, 12);
  PodSpec threaded = serial;
  threaded.threads = 4;
  EXPECT_TRUE(same(run_pod_campaign(scene, head, serial), run_pod_campaign(scene, head, threaded)));
}

TEST(Campaign, WindowMustCoverPlacementRegion) {
  const WarehouseScene scene({}, {}, {testing_support::flat_patch("coupon", 0.5, 0.5)}, {}, 20.0);
  EXPECT_MIM_ERROR(run_pod_campaign(scene, head_over_center(scene, "coupon", 2.0), crater_spec(3)),
                   ErrorCode::InvalidArgument);
}

TEST(Campaign, InvalidSpecs) {
  const auto scene = coupon_scene(0.05);
  const auto head = coupon_head(scene);
  EXPECT_MIM_ERROR(run_pod_campaign(scene, head, crater_spec(0)), ErrorCode::InvalidArgument);
  PodSpec unknown = crater_spec(3);
  unknown.patch_id = "nowhere";
  EXPECT_MIM_ERROR(run_pod_campaign(scene, head, unknown), ErrorCode::UnknownPatch);
}

TEST(Requirements, DefectSizes) {
  EXPECT_DOUBLE_EQ(requirement_crater().diameter_mm, 0.6);
  EXPECT_DOUBLE_EQ(requirement_scratch().depth_mm, 0.3);
}
