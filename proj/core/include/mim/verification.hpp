#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mim/inspection.hpp"
#include "mim/scene.hpp"
#include "mim/sensors.hpp"

namespace mim {

inline constexpr double kTargetPod = 0.90;
inline constexpr double kPodConfidence = 0.95;

/// P[X >= k] for X ~ Binomial(n, p), accumulated in the log domain.
double binomial_upper_tail(int k, int n, double p);

/// Exact one-sided Clopper-Pearson lower bound: the largest p with
/// P[Binomial(n, p) >= k] <= alpha. Errors: InvalidArgument.
double clopper_pearson_lower(int k, int n, double alpha);

/// Smallest n for which n hits out of n demonstrate `target_pod` at
/// `confidence`. Errors: InvalidArgument.
int min_trials_zero_failure(double target_pod, double confidence);

/// Defect of the crater class sized at the resolution requirement.
ImpactCrater requirement_crater();
/// Scratch sized at the profilometry requirement (0.3 mm deep).
Scratch requirement_scratch();

struct PodSpec {
  DefectKind defect = requirement_crater();
  std::string patch_id;
  int n_trials = 29;
  std::uint64_t base_seed = 0;
  double confidence = kPodConfidence;
  double target_pod = kTargetPod;
  /// A trial is a hit when a detection centroid lies this close to the
  /// injected center.
  double hit_tolerance_mm = 2.0;
  DetectorParams detector;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct PodTrial {
  int index = 0;
  std::uint64_t seed = 0;
  Vec2 placement_uv = Vec2::Zero();
  bool detected = false;
  /// Distance from the injected center to the nearest detection (mm), or
  /// negative when nothing was detected.
  double nearest_mm = -1.0;
};

struct PodResult {
  int hits = 0;
  int trials = 0;
  double alpha = 1.0 - kPodConfidence;
  double confidence = kPodConfidence;
  double target_pod = kTargetPod;
  double pod_lower_bound = 0.0;
  bool pass = false;
  std::vector<PodTrial> records;
};

/// Aggregates hit/miss counts against the target.
PodResult summarize_pod(int hits, int trials, double confidence = kPodConfidence, double target_pod = kTargetPod);

/// Hit/miss campaign: per trial, inject one defect at a seeded uniform
/// placement, scan, detect and score. Trial i uses seed base_seed + i, so
/// the result does not depend on the thread count.
/// Errors: UnknownPatch, InvalidArgument, and scan errors.
PodResult run_pod_campaign(const WarehouseScene& scene, const SensorHead& head, const PodSpec& spec);

}  // namespace mim
