#include "mim/inspection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>

#include "mim/error.hpp"

namespace mim {

namespace {

// Cell-center occupancy grid over one patch.
class CoverageGrid {
 public:
  CoverageGrid(const SurfacePatch& patch, int cells) : patch_(&patch), cells_(cells), covered_(cells * cells, 0) {}

  Vec2 center(int i, int j) const {
    return {(i + 0.5) * patch_->extent_u / cells_, (j + 0.5) * patch_->extent_v / cells_};
  }

  // Index range of cell centers that can fall inside [lo, hi] along an axis.
  std::pair<int, int> span(double lo, double hi, double extent) const {
    const double cell = extent / cells_;
    const int a = std::max(0, static_cast<int>(std::floor(lo / cell - 0.5)));
    const int b = std::min(cells_ - 1, static_cast<int>(std::ceil(hi / cell - 0.5)));
    return {a, b};
  }

  template <typename Fn>
  void for_cells_in(const Polygon& poly, Fn&& fn) const {
    if (poly.size() < 3) return;
    double ulo = poly[0].x(), uhi = ulo, vlo = poly[0].y(), vhi = vlo;
    for (const auto& p : poly) {
      ulo = std::min(ulo, p.x());
      uhi = std::max(uhi, p.x());
      vlo = std::min(vlo, p.y());
      vhi = std::max(vhi, p.y());
    }
    const auto [i0, i1] = span(ulo, uhi, patch_->extent_u);
    const auto [j0, j1] = span(vlo, vhi, patch_->extent_v);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        if (point_in_convex_polygon(poly, center(i, j))) fn(j * cells_ + i);
  }

  int gain(const Polygon& poly) const {
    int n = 0;
    for_cells_in(poly, [&](int k) { n += covered_[k] == 0; });
    return n;
  }
  void mark(const Polygon& poly) {
    for_cells_in(poly, [&](int k) { covered_[k] = 1; });
  }
  double fraction() const {
    return static_cast<double>(std::count(covered_.begin(), covered_.end(), 1)) / covered_.size();
  }
  bool complete() const { return std::all_of(covered_.begin(), covered_.end(), [](char c) { return c != 0; }); }

 private:
  const SurfacePatch* patch_;
  int cells_;
  std::vector<char> covered_;
};

// Window centers along one axis: the fewest evenly spaced windows that tile
// [0, extent] while staying inside it.
std::vector<double> lattice(double extent, double window) {
  const int n = std::max(1, static_cast<int>(std::ceil(extent / window - 1e-9)));
  if (n == 1) return {extent / 2.0};
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(window / 2.0 + i * (extent - window) / (n - 1));
  return out;
}

double choose_standoff(StandoffRange range, const PlannerParams& params) {
  const double lo = std::max(range.min_m, kMinStandoff);
  const double hi = std::min(range.max_m, kMaxStandoff);
  require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, ErrorCode::InvalidArgument,
          "standoff range is empty or outside [0.2, 2.0] m");
  for (double s : params.standoffs_m)
    if (s >= lo && s <= hi) return s;
  const double first = params.standoffs_m.empty() ? (lo + hi) / 2.0 : params.standoffs_m.front();
  return std::clamp(first, lo, hi);
}

}  // namespace

std::string_view to_string(DefectClass c) { return c == DefectClass::Scratch ? "scratch" : "impact"; }
std::string_view to_string(ThermalClass c) { return c == ThermalClass::Hot ? "hot" : "cold"; }

InspectionPlan plan_viewpoints(const WarehouseScene& scene, std::span<const std::string> patch_ids,
                               const SensorHead& head, StandoffRange range, const PlannerParams& params) {
  validate(head);
  require(params.coverage_cells > 0, ErrorCode::InvalidArgument, "coverage grid needs at least one cell");
  const double standoff = choose_standoff(range, params);

  InspectionPlan plan;
  for (const auto& id : patch_ids) {
    const SurfacePatch& p = scene.patch(id);
    if (p.reachable) {
      plan.inspected_patches.push_back(id);
      plan.reachable_area_m2 += p.area();
    } else {
      plan.unreachable_patches.push_back(id);
    }
  }
  require(!plan.inspected_patches.empty(), ErrorCode::NoReachableSurface, "no reachable patch to inspect");

  struct Candidate {
    std::size_t patch;
    Vec2 center;
    Polygon footprint;
  };
  std::vector<CoverageGrid> grids;
  std::vector<Candidate> candidates;
  const double wu = head.profilometer.scan_u_m;
  const double wv = head.profilometer.scan_v_m;
  for (std::size_t k = 0; k < plan.inspected_patches.size(); ++k) {
    const SurfacePatch& p = scene.patch(plan.inspected_patches[k]);
    grids.emplace_back(p, params.coverage_cells);
    for (double v : lattice(p.extent_v, wv))
      for (double u : lattice(p.extent_u, wu)) {
        const Polygon rect = rectangle(u - wu / 2, v - wv / 2, u + wu / 2, v + wv / 2);
        candidates.push_back({k, Vec2(u, v), clip_to_rectangle(rect, p.extent_u, p.extent_v)});
      }
  }

  std::vector<bool> used(candidates.size(), false);
  for (;;) {
    int best_gain = 0;
    std::size_t best = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      const int g = grids[candidates[c].patch].gain(candidates[c].footprint);
      if (g > best_gain) {
        best_gain = g;
        best = c;
      }
    }
    if (best_gain == 0) break;
    used[best] = true;
    const Candidate& cand = candidates[best];
    grids[cand.patch].mark(cand.footprint);
    const std::string& id = plan.inspected_patches[cand.patch];
    Viewpoint vp;
    vp.pose = pose_facing(scene.view(id), cand.center, standoff);
    vp.standoff_m = standoff;
    vp.covers.push_back({id, cand.footprint});
    plan.viewpoints.push_back(std::move(vp));
  }
  plan.coverage_fraction = coverage(plan, scene, plan.inspected_patches, params.coverage_cells);
  return plan;
}

InspectionPlan plan_viewpoints(const WarehouseScene& scene, const Oru& oru, const SensorHead& head,
                               StandoffRange range, const PlannerParams& params) {
  std::vector<std::string> ids;
  for (const auto& p : oru.patches()) ids.push_back(p.id);
  return plan_viewpoints(scene, ids, head, range, params);
}

namespace {

double coverage_of(const InspectionPlan& plan, const std::vector<const SurfacePatch*>& patches, int cells) {
  require(cells > 0, ErrorCode::InvalidArgument, "coverage grid needs at least one cell");
  double total = 0.0;
  double covered = 0.0;
  for (const SurfacePatch* p : patches) {
    if (!p->reachable) continue;
    CoverageGrid grid(*p, cells);
    for (const auto& vp : plan.viewpoints)
      for (const auto& c : vp.covers)
        if (c.patch_id == p->id) grid.mark(clip_to_rectangle(c.footprint, p->extent_u, p->extent_v));
    total += p->area();
    covered += p->area() * grid.fraction();
  }
  if (total <= 0.0) return 0.0;
  return std::clamp(covered / total, 0.0, 1.0);
}

}  // namespace

double coverage(const InspectionPlan& plan, const WarehouseScene& scene, std::span<const std::string> patch_ids,
                int cells) {
  std::vector<const SurfacePatch*> patches;
  for (const auto& id : patch_ids) patches.push_back(&scene.patch(id));
  return coverage_of(plan, patches, cells);
}

double coverage(const InspectionPlan& plan, const Oru& oru, int cells) {
  std::vector<const SurfacePatch*> patches;
  for (const auto& p : oru.patches()) patches.push_back(&p);
  return coverage_of(plan, patches, cells);
}

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
  return m;
}

}  // namespace

SurfaceAnalysis analyze_surface(const PointCloud& cloud, const DetectorParams& params) {
  require(!cloud.points.empty(), ErrorCode::EmptyCloud, "point cloud is empty");
  require(cloud.cols * cloud.rows == cloud.points.size(), ErrorCode::InvalidArgument,
          "point count does not match the sample grid");
  SurfaceAnalysis out;
  const auto& pts = cloud.points;
  const double n = static_cast<double>(pts.size());

  // Least squares z = a x + b y + c on centered coordinates.
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= n;
  Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
  Eigen::Vector2d atz = Eigen::Vector2d::Zero();
  for (const auto& p : pts) {
    const Eigen::Vector2d d(p.x() - mean.x(), p.y() - mean.y());
    ata += d * d.transpose();
    atz += d * (p.z() - mean.z());
  }
  const Eigen::Vector2d ab = ata.completeOrthogonalDecomposition().solve(atz);
  out.plane_a = ab.x();
  out.plane_b = ab.y();
  out.plane_c = mean.z() - ab.x() * mean.x() - ab.y() * mean.y();

  out.residuals_mm.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    out.residuals_mm[i] = (p.z() - mean.z() - ab.x() * (p.x() - mean.x()) - ab.y() * (p.y() - mean.y())) * 1000.0;
  }

  std::vector<double> scratch = out.residuals_mm;
  const double med = median_inplace(scratch);
  for (std::size_t i = 0; i < scratch.size(); ++i) scratch[i] = std::abs(out.residuals_mm[i] - med);
  out.sigma_est_mm = 1.4826 * median_inplace(scratch);

  out.threshold_mm = std::max(params.sigma_factor * out.sigma_est_mm, params.min_threshold_mm) * params.threshold_scale;
  out.grow_threshold_mm = std::min(out.threshold_mm, std::max(params.sigma_factor * out.sigma_est_mm,
                                                              params.grow_fraction * out.threshold_mm));

  const auto cols = static_cast<long>(cloud.cols);
  const auto rows = static_cast<long>(cloud.rows);
  const auto& res = out.residuals_mm;
  std::vector<int> label(pts.size(), -1);

  auto flood = [&](long start, int id, auto&& accept) {
    std::vector<long> members{start};
    label[static_cast<std::size_t>(start)] = id;
    for (std::size_t q = 0; q < members.size(); ++q) {
      const long r = members[q] / cols;
      const long c = members[q] % cols;
      for (long dr = -1; dr <= 1; ++dr)
        for (long dc = -1; dc <= 1; ++dc) {
          const long rr = r + dr;
          const long cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          const long k = rr * cols + cc;
          if (label[static_cast<std::size_t>(k)] != -1 || !accept(k)) continue;
          label[static_cast<std::size_t>(k)] = id;
          members.push_back(k);
        }
    }
    return members;
  };

  // Seed clusters above the detection threshold.
  std::vector<std::vector<long>> clusters;
  for (long k = 0; k < static_cast<long>(pts.size()); ++k) {
    if (label[static_cast<std::size_t>(k)] != -1 || std::abs(res[static_cast<std::size_t>(k)]) <= out.threshold_mm)
      continue;
    const bool negative = res[static_cast<std::size_t>(k)] < 0;
    const int id = static_cast<int>(clusters.size());
    clusters.push_back(flood(k, id, [&](long j) {
      const double r = res[static_cast<std::size_t>(j)];
      return std::abs(r) > out.threshold_mm && (r < 0) == negative;
    }));
  }

  const double pitch = cloud.pitch_mm;
  for (std::size_t id = 0; id < clusters.size(); ++id) {
    auto& members = clusters[id];
    if (members.size() < params.min_cluster_samples) continue;
    // Grow into the same-sign shoulder so the extent reflects the whole defect.
    const bool negative = res[static_cast<std::size_t>(members.front())] < 0;
    for (std::size_t q = 0; q < members.size(); ++q) {
      const long r = members[q] / cols;
      const long c = members[q] % cols;
      for (long dr = -1; dr <= 1; ++dr)
        for (long dc = -1; dc <= 1; ++dc) {
          const long rr = r + dr;
          const long cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          const long k = rr * cols + cc;
          const double v = res[static_cast<std::size_t>(k)];
          if (label[static_cast<std::size_t>(k)] != -1 || std::abs(v) <= out.grow_threshold_mm || (v < 0) != negative)
            continue;
          label[static_cast<std::size_t>(k)] = static_cast<int>(id);
          members.push_back(k);
        }
    }

    DetectedDefect d;
    d.patch_id = cloud.patch_id;
    d.samples = members.size();
    double wsum = 0.0;
    Vec2 centroid = Vec2::Zero();
    Vec2 mean_xy = Vec2::Zero();
    for (long k : members) {
      const auto& p = pts[static_cast<std::size_t>(k)];
      const double w = std::abs(res[static_cast<std::size_t>(k)]);
      centroid += w * Vec2(p.x(), p.y());
      wsum += w;
      mean_xy += Vec2(p.x(), p.y());
      if (std::abs(res[static_cast<std::size_t>(k)]) > std::abs(d.peak_residual_mm))
        d.peak_residual_mm = res[static_cast<std::size_t>(k)];
    }
    d.centroid_uv = centroid / wsum;
    mean_xy /= static_cast<double>(members.size());

    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (long k : members) {
      const auto& p = pts[static_cast<std::size_t>(k)];
      const Eigen::Vector2d dxy = Vec2(p.x(), p.y()) - mean_xy;
      cov += dxy * dxy.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    double extent[2];
    for (int axis = 0; axis < 2; ++axis) {
      const Eigen::Vector2d dir = eig.eigenvectors().col(axis);
      double lo = 0.0;
      double hi = 0.0;
      bool first = true;
      for (long k : members) {
        const auto& p = pts[static_cast<std::size_t>(k)];
        const double t = dir.dot(Vec2(p.x(), p.y()) - mean_xy) * 1000.0;
        lo = first ? t : std::min(lo, t);
        hi = first ? t : std::max(hi, t);
        first = false;
      }
      // Each sample stands for one pitch-wide cell.
      extent[axis] = hi - lo + pitch;
    }
    d.major_extent_mm = std::max(extent[0], extent[1]);
    d.minor_extent_mm = std::min(extent[0], extent[1]);
    d.elongation = d.major_extent_mm / d.minor_extent_mm;
    d.size_mm = d.major_extent_mm;
    d.kind_guess = classify_defect(d, params.elongation_ratio);
    out.defects.push_back(std::move(d));
  }
  return out;
}

std::vector<DetectedDefect> detect_surface_defects(const PointCloud& cloud, const DetectorParams& params) {
  return analyze_surface(cloud, params).defects;
}

DefectClass classify_defect(const DetectedDefect& d, double elongation_ratio) {
  return d.elongation >= elongation_ratio ? DefectClass::Scratch : DefectClass::Impact;
}

std::vector<ThermalAnomaly> detect_thermal_anomalies(const ThermalFrame& frame, double expected_c,
                                                     double threshold_c) {
  constexpr int W = ThermalModel::kWidth;
  constexpr int H = ThermalModel::kHeight;
  require(frame.values.size() == static_cast<std::size_t>(W * H), ErrorCode::InvalidArgument,
          "thermal frame must be 80x62");
  require(threshold_c >= 0.0, ErrorCode::InvalidArgument, "threshold must be >= 0");
  auto delta = [&](int c, int r) { return frame.at(c, r) - expected_c; };
  std::vector<char> seen(static_cast<std::size_t>(W * H), 0);
  std::vector<ThermalAnomaly> out;
  for (int r0 = 0; r0 < H; ++r0)
    for (int c0 = 0; c0 < W; ++c0) {
      if (seen[static_cast<std::size_t>(r0 * W + c0)] || std::abs(delta(c0, r0)) <= threshold_c) continue;
      const bool hot = delta(c0, r0) > 0;
      ThermalAnomaly a;
      a.patch_id = frame.patch_id;
      a.classification = hot ? ThermalClass::Hot : ThermalClass::Cold;
      std::deque<std::pair<int, int>> queue{{c0, r0}};
      seen[static_cast<std::size_t>(r0 * W + c0)] = 1;
      double sum = 0.0;
      while (!queue.empty()) {
        const auto [c, r] = queue.front();
        queue.pop_front();
        a.pixels.emplace_back(c, r);
        const double d = delta(c, r);
        sum += d;
        if (std::abs(d) > std::abs(a.peak_delta_c)) a.peak_delta_c = d;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int cc = c + dc;
            const int rr = r + dr;
            if (cc < 0 || cc >= W || rr < 0 || rr >= H || seen[static_cast<std::size_t>(rr * W + cc)]) continue;
            const double dd = delta(cc, rr);
            if (std::abs(dd) <= threshold_c || (dd > 0) != hot) continue;
            seen[static_cast<std::size_t>(rr * W + cc)] = 1;
            queue.emplace_back(cc, rr);
          }
      }
      std::sort(a.pixels.begin(), a.pixels.end(),
                [](const auto& x, const auto& y) { return std::tie(x.second, x.first) < std::tie(y.second, y.first); });
      a.mean_delta_c = sum / static_cast<double>(a.pixels.size());
      out.push_back(std::move(a));
    }
  return out;
}

}  // namespace mim
