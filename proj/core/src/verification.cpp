#include "mim/verification.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "mim/error.hpp"
#include "mim/random.hpp"

namespace mim {

double binomial_upper_tail(int k, int n, double p) {
  require(n >= 0 && k >= 0 && k <= n, ErrorCode::InvalidArgument, "need 0 <= k <= n");
  require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidArgument, "p must lie in [0,1]");
  if (k == 0) return 1.0;
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_nf = std::lgamma(n + 1.0);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n - k + 1));
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = k; i <= n; ++i) {
    const double t = log_nf - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * log_p + (n - i) * log_q;
    terms.push_back(t);
    peak = std::max(peak, t);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return std::min(1.0, std::exp(peak + std::log(sum)));
}

double clopper_pearson_lower(int k, int n, double alpha) {
  require(n >= 1 && k >= 0 && k <= n, ErrorCode::InvalidArgument, "need 0 <= k <= n and n >= 1");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
  if (k == 0) return 0.0;
  if (k == n) return std::pow(alpha, 1.0 / n);
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (binomial_upper_tail(k, n, mid) <= alpha ? lo : hi) = mid;
  }
  return lo;
}

int min_trials_zero_failure(double target_pod, double confidence) {
  require(target_pod > 0.0 && target_pod < 1.0, ErrorCode::InvalidArgument, "target POD must lie in (0,1)");
  require(confidence > 0.0 && confidence < 1.0, ErrorCode::InvalidArgument, "confidence must lie in (0,1)");
  const double alpha = 1.0 - confidence;
  int n = std::max(1, static_cast<int>(std::ceil(std::log(alpha) / std::log(target_pod))));
  // Guard the ceiling against rounding on either side.
  while (n > 1 && std::pow(alpha, 1.0 / (n - 1)) >= target_pod) --n;
  while (std::pow(alpha, 1.0 / n) < target_pod) ++n;
  return n;
}

ImpactCrater requirement_crater() { return {0.6, 0.2}; }
Scratch requirement_scratch() { return {0.3, 0.5, 5.0, 0.0}; }

PodResult summarize_pod(int hits, int trials, double confidence, double target_pod) {
  require(trials >= 1 && hits >= 0 && hits <= trials, ErrorCode::InvalidArgument, "need 0 <= hits <= trials");
  PodResult r;
  r.hits = hits;
  r.trials = trials;
  r.confidence = confidence;
  r.alpha = 1.0 - confidence;
  r.target_pod = target_pod;
  r.pod_lower_bound = clopper_pearson_lower(hits, trials, r.alpha);
  r.pass = r.pod_lower_bound >= target_pod;
  return r;
}

namespace {

PodTrial run_trial(const WarehouseScene& scene, const SensorHead& head, const PodSpec& spec, int index) {
  PodTrial t;
  t.index = index;
  t.seed = spec.base_seed + static_cast<std::uint64_t>(index);
  const SurfacePatch& patch = scene.patch(spec.patch_id);
  const double inset = bounding_radius_mm(spec.defect) / 1000.0;

  Rng placement(t.seed);
  const double u = placement.uniform(inset, patch.extent_u - inset);
  const double v = placement.uniform(inset, patch.extent_v - inset);
  t.placement_uv = Vec2(u, v);

  const WarehouseScene trial_scene = add_defect(scene, Defect{spec.defect, spec.patch_id, t.placement_uv});
  const PointCloud cloud = scan_profile(trial_scene, head, spec.patch_id, mix_seed(t.seed));
  for (const auto& d : detect_surface_defects(cloud, spec.detector)) {
    const double dist = (d.centroid_uv - t.placement_uv).norm() * 1000.0;
    if (t.nearest_mm < 0.0 || dist < t.nearest_mm) t.nearest_mm = dist;
  }
  t.detected = t.nearest_mm >= 0.0 && t.nearest_mm <= spec.hit_tolerance_mm;
  return t;
}

}  // namespace

PodResult run_pod_campaign(const WarehouseScene& scene, const SensorHead& head, const PodSpec& spec) {
  require(spec.n_trials >= 1, ErrorCode::InvalidArgument, "campaign needs at least one trial");
  require(spec.hit_tolerance_mm > 0.0, ErrorCode::InvalidArgument, "hit tolerance must be > 0");
  require(!std::holds_alternative<ThermalHotspot>(spec.defect), ErrorCode::InvalidArgument,
          "campaigns inject surface defects only");
  const SurfacePatch& patch = scene.patch(spec.patch_id);
  const double inset = bounding_radius_mm(spec.defect) / 1000.0;
  require(patch.extent_u > 2 * inset && patch.extent_v > 2 * inset, ErrorCode::InvalidArgument,
          "patch too small for the defect template");
  validate(head);
  const Polygon window = scan_footprint(scene.view(spec.patch_id), head);
  constexpr double kSlack = 1e-9;
  require(window[0].x() <= inset + kSlack && window[0].y() <= inset + kSlack &&
              window[2].x() >= patch.extent_u - inset - kSlack && window[2].y() >= patch.extent_v - inset - kSlack,
          ErrorCode::InvalidArgument, "scan window does not cover the placement region of patch '" + patch.id + "'");

  std::vector<PodTrial> records(static_cast<std::size_t>(spec.n_trials));
  unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(spec.n_trials));
  if (workers <= 1) {
    for (int i = 0; i < spec.n_trials; ++i) records[static_cast<std::size_t>(i)] = run_trial(scene, head, spec, i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (int i = next++; i < spec.n_trials && !failed; i = next++) {
            try {
              records[static_cast<std::size_t>(i)] = run_trial(scene, head, spec, i);
            } catch (...) {
              if (!failed.exchange(true)) error = std::current_exception();
            }
          }
        });
    }
    if (error) std::rethrow_exception(error);
  }

  const int hits = static_cast<int>(std::count_if(records.begin(), records.end(), [](const PodTrial& t) { return t.detected; }));
  PodResult r = summarize_pod(hits, spec.n_trials, spec.confidence, spec.target_pod);
  r.records = std::move(records);
  return r;
}

}  // namespace mim
