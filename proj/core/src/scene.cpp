#include "mim/scene.hpp"

#include <cmath>
#include <set>

#include "mim/error.hpp"

namespace mim {

namespace {

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void validate_kind(const DefectKind& kind) {
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Scratch>) {
          require(positive(k.depth_mm) && positive(k.width_mm) && positive(k.length_mm),
                  ErrorCode::InvalidArgument, "scratch sizes must be > 0");
          require(std::isfinite(k.angle_rad), ErrorCode::InvalidArgument, "scratch angle must be finite");
        } else if constexpr (std::is_same_v<T, ImpactCrater>) {
          require(positive(k.diameter_mm) && positive(k.depth_mm), ErrorCode::InvalidArgument,
                  "crater sizes must be > 0");
        } else {
          require(std::isfinite(k.delta_c) && k.delta_c != 0.0, ErrorCode::InvalidArgument,
                  "hotspot delta must be finite and non-zero");
          require(positive(k.radius_mm), ErrorCode::InvalidArgument, "hotspot radius must be > 0");
        }
      },
      kind);
}

}  // namespace

void validate(const SurfacePatch& patch) {
  require(!patch.id.empty(), ErrorCode::InvalidArgument, "patch id must not be empty");
  validate(patch.frame);
  require(positive(patch.extent_u) && positive(patch.extent_v), ErrorCode::InvalidArgument,
          "patch '" + patch.id + "' extents must be > 0");
  require(std::isfinite(patch.base_temperature), ErrorCode::InvalidArgument,
          "patch '" + patch.id + "' base temperature must be finite");
  require(patch.emissivity >= 0.0 && patch.emissivity <= 1.0, ErrorCode::InvalidArgument,
          "patch '" + patch.id + "' emissivity must lie in [0,1]");
}

double displacement_mm(const Defect& defect, const Vec2& uv) {
  const Vec2 d_mm = (uv - defect.uv) * 1000.0;
  if (const auto* c = std::get_if<ImpactCrater>(&defect.kind)) {
    // Parabolic cap: -depth at the center, zero at the rim.
    const double radius = c->diameter_mm / 2.0;
    const double r2 = d_mm.squaredNorm() / (radius * radius);
    return r2 < 1.0 ? -c->depth_mm * (1.0 - r2) : 0.0;
  }
  if (const auto* s = std::get_if<Scratch>(&defect.kind)) {
    const double along = d_mm.x() * std::cos(s->angle_rad) + d_mm.y() * std::sin(s->angle_rad);
    const double across = -d_mm.x() * std::sin(s->angle_rad) + d_mm.y() * std::cos(s->angle_rad);
    const double half_width = s->width_mm / 2.0;
    if (std::abs(along) > s->length_mm / 2.0 || std::abs(across) >= half_width) return 0.0;
    const double t = across / half_width;
    return -s->depth_mm * (1.0 - t * t);
  }
  return 0.0;
}

double temperature_offset_c(const Defect& defect, const Vec2& uv) {
  const auto* h = std::get_if<ThermalHotspot>(&defect.kind);
  if (h == nullptr) return 0.0;
  const double r = (uv - defect.uv).norm() * 1000.0;
  return r < h->radius_mm ? h->delta_c * (1.0 - r / h->radius_mm) : 0.0;
}

double bounding_radius_mm(const DefectKind& kind) {
  return std::visit(
      [](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Scratch>)
          return std::hypot(k.length_mm / 2.0, k.width_mm / 2.0);
        else if constexpr (std::is_same_v<T, ImpactCrater>)
          return k.diameter_mm / 2.0;
        else
          return k.radius_mm;
      },
      kind);
}

std::string_view kind_name(const DefectKind& kind) {
  switch (kind.index()) {
    case 0: return "scratch";
    case 1: return "crater";
    default: return "hotspot";
  }
}

Oru::Oru(std::string id, std::vector<SurfacePatch> patches, std::array<double, 3> bounding_box, Pose pose)
    : id_(std::move(id)), patches_(std::move(patches)), bounding_box_(bounding_box), pose_(pose) {
  require(!id_.empty(), ErrorCode::InvalidArgument, "ORU id must not be empty");
  require(!patches_.empty(), ErrorCode::InvalidArgument, "ORU '" + id_ + "' needs at least one patch");
  validate(pose_);
  std::set<std::string> seen;
  for (const auto& p : patches_) {
    validate(p);
    require(seen.insert(p.id).second, ErrorCode::InvalidArgument,
            "duplicate patch id '" + p.id + "' in ORU '" + id_ + "'");
  }
  for (double e : bounding_box_)
    require(std::isfinite(e) && e >= 0.0, ErrorCode::InvalidArgument, "bounding box extents must be >= 0");
}

double external_area(const Oru& oru) {
  double area = 0.0;
  for (const auto& p : oru.patches()) area += p.area();
  return area;
}

Oru make_box_oru(std::string id, const Vec3& size, const Pose& pose) {
  require(size.minCoeff() > 0.0 && size.allFinite(), ErrorCode::InvalidArgument, "box size must be positive");
  const Vec3 h = size / 2.0;
  const Vec3 x = Vec3::UnitX(), y = Vec3::UnitY(), z = Vec3::UnitZ();
  struct Face {
    const char* name;
    Vec3 origin, u, v;
    double eu, ev;
  };
  const Face faces[] = {
      {"+x", {h.x(), -h.y(), -h.z()}, y, z, size.y(), size.z()},
      {"-x", {-h.x(), -h.y(), -h.z()}, z, y, size.z(), size.y()},
      {"+y", {-h.x(), h.y(), -h.z()}, z, x, size.z(), size.x()},
      {"-y", {-h.x(), -h.y(), -h.z()}, x, z, size.x(), size.z()},
      {"+z", {-h.x(), -h.y(), h.z()}, x, y, size.x(), size.y()},
      {"-z", {-h.x(), -h.y(), -h.z()}, y, x, size.y(), size.x()},
  };
  std::vector<SurfacePatch> patches;
  for (const Face& f : faces) {
    Eigen::Matrix3d r;
    r << f.u, f.v, f.u.cross(f.v);
    SurfacePatch p;
    p.id = id + ":" + f.name;
    p.frame = Pose::make(f.origin, Quat(r).normalized());
    p.extent_u = f.eu;
    p.extent_v = f.ev;
    patches.push_back(std::move(p));
  }
  return Oru(std::move(id), std::move(patches), {size.x(), size.y(), size.z()}, pose);
}

double PatchView::height_mm(const Vec2& uv) const {
  double h = 0.0;
  for (const Defect* d : defects) h += displacement_mm(*d, uv);
  return h;
}

double PatchView::temperature_c(const Vec2& uv) const {
  double t = patch->base_temperature;
  for (const Defect* d : defects) t += temperature_offset_c(*d, uv);
  return t;
}

WarehouseScene::WarehouseScene(std::vector<FixturePoint> fixtures, std::vector<Oru> orus,
                               std::vector<SurfacePatch> structure_patches, std::vector<Defect> defects,
                               double ambient_temperature)
    : fixtures_(std::move(fixtures)),
      orus_(std::move(orus)),
      structure_patches_(std::move(structure_patches)),
      defects_(std::move(defects)),
      ambient_temperature_(ambient_temperature) {
  require(std::isfinite(ambient_temperature_), ErrorCode::InvalidArgument, "ambient temperature must be finite");
  std::set<std::string> ids;
  for (const auto& f : fixtures_) {
    require(!f.id.empty(), ErrorCode::InvalidArgument, "fixture id must not be empty");
    require(ids.insert(f.id).second, ErrorCode::InvalidArgument, "duplicate fixture id '" + f.id + "'");
    validate(f.pose);
  }
  std::set<std::string> occupants;
  for (const auto& f : fixtures_)
    if (f.occupant)
      require(occupants.insert(*f.occupant).second, ErrorCode::InvalidArgument,
              "port '" + *f.occupant + "' occupies more than one fixture");
  ids.clear();
  for (const auto& o : orus_)
    require(ids.insert(o.id()).second, ErrorCode::InvalidArgument, "duplicate ORU id '" + o.id() + "'");
  for (const auto& p : structure_patches_) validate(p);
  index();
  for (const auto& d : defects_) {
    validate_kind(d.kind);
    const SurfacePatch& p = patch(d.patch_id);
    require(p.contains(d.uv), ErrorCode::OutOfBounds, "defect outside patch '" + d.patch_id + "'");
  }
}

void WarehouseScene::index() {
  patch_index_.clear();
  auto add = [&](const std::string& id, PatchRef r) {
    require(patch_index_.emplace(id, r).second, ErrorCode::InvalidArgument, "duplicate patch id '" + id + "'");
  };
  for (std::size_t o = 0; o < orus_.size(); ++o)
    for (std::size_t i = 0; i < orus_[o].patches().size(); ++i)
      add(orus_[o].patches()[i].id, PatchRef{static_cast<int>(o), i});
  for (std::size_t i = 0; i < structure_patches_.size(); ++i) add(structure_patches_[i].id, PatchRef{-1, i});
}

const WarehouseScene::PatchRef& WarehouseScene::ref(std::string_view id) const {
  auto it = patch_index_.find(std::string(id));
  if (it == patch_index_.end()) fail(ErrorCode::UnknownPatch, "no patch '" + std::string(id) + "'");
  return it->second;
}

bool WarehouseScene::has_patch(std::string_view id) const { return patch_index_.contains(std::string(id)); }

const SurfacePatch& WarehouseScene::patch(std::string_view id) const {
  const PatchRef& r = ref(id);
  return r.oru < 0 ? structure_patches_[r.index] : orus_[static_cast<std::size_t>(r.oru)].patches()[r.index];
}

Pose WarehouseScene::patch_world_frame(std::string_view id) const {
  const PatchRef& r = ref(id);
  const SurfacePatch& p = patch(id);
  return r.oru < 0 ? p.frame : orus_[static_cast<std::size_t>(r.oru)].pose().compose(p.frame);
}

PatchView WarehouseScene::view(std::string_view patch_id) const {
  PatchView v;
  v.patch = &patch(patch_id);
  v.world = patch_world_frame(patch_id);
  for (const auto& d : defects_)
    if (d.patch_id == patch_id) v.defects.push_back(&d);
  return v;
}

const FixturePoint& WarehouseScene::fixture(std::string_view id) const {
  for (const auto& f : fixtures_)
    if (f.id == id) return f;
  fail(ErrorCode::UnknownFixture, "no fixture '" + std::string(id) + "'");
}

const Oru& WarehouseScene::oru(std::string_view id) const {
  for (const auto& o : orus_)
    if (o.id() == id) return o;
  fail(ErrorCode::InvalidArgument, "no ORU '" + std::string(id) + "'");
}

WarehouseScene WarehouseScene::with_defect(Defect defect) const {
  const SurfacePatch& p = patch(defect.patch_id);
  require(p.contains(defect.uv), ErrorCode::OutOfBounds, "defect outside patch '" + defect.patch_id + "'");
  validate_kind(defect.kind);
  WarehouseScene out = *this;
  out.defects_.push_back(std::move(defect));
  return out;
}

WarehouseScene add_defect(const WarehouseScene& scene, Defect defect) {
  return scene.with_defect(std::move(defect));
}

double surface_height(const WarehouseScene& scene, std::string_view patch_id, const Vec2& uv) {
  const SurfacePatch& p = scene.patch(patch_id);
  require(p.contains(uv), ErrorCode::OutOfBounds, "uv outside patch '" + std::string(patch_id) + "'");
  return scene.view(patch_id).height_mm(uv);
}

double surface_temperature(const WarehouseScene& scene, std::string_view patch_id, const Vec2& uv) {
  return scene.view(patch_id).temperature_c(uv);
}

}  // namespace mim
