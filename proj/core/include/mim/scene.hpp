#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mim/geometry.hpp"

namespace mim {

enum class LocationClass { Internal, External };

struct FixturePoint {
  std::string id;
  Pose pose;
  LocationClass location = LocationClass::External;
  /// Port of a foreign module holding this fixture, if any.
  std::optional<std::string> occupant;
};

/// Planar rectangle. Patch coordinates (u, v) are meters from the frame
/// origin along the frame x and y axes; the outward normal is frame +z.
struct SurfacePatch {
  std::string id;
  Pose frame;
  double extent_u = 0.0;
  double extent_v = 0.0;
  double emissivity = 0.9;
  double base_temperature = 20.0;
  bool reachable = true;

  bool contains(const Vec2& uv) const {
    return uv.x() >= 0.0 && uv.y() >= 0.0 && uv.x() <= extent_u && uv.y() <= extent_v;
  }
  double area() const { return extent_u * extent_v; }
};

void validate(const SurfacePatch& patch);

// Defect sizes are millimeters; placement is in patch meters.
struct Scratch {
  double depth_mm = 0.0;
  double width_mm = 0.0;
  double length_mm = 0.0;
  /// Groove direction measured from the patch u axis.
  double angle_rad = 0.0;
};

struct ImpactCrater {
  double diameter_mm = 0.0;
  double depth_mm = 0.0;
};

struct ThermalHotspot {
  double delta_c = 0.0;  // signed
  double radius_mm = 0.0;
};

using DefectKind = std::variant<Scratch, ImpactCrater, ThermalHotspot>;

struct Defect {
  DefectKind kind;
  std::string patch_id;
  Vec2 uv = Vec2::Zero();
};

/// Surface displacement (mm, negative into the surface) contributed by one
/// defect at `uv`. Zero for thermal hotspots.
double displacement_mm(const Defect& defect, const Vec2& uv);
/// Temperature offset (°C) contributed by one defect at `uv`.
double temperature_offset_c(const Defect& defect, const Vec2& uv);
/// Radius (mm) of the disc that fully contains the defect footprint.
double bounding_radius_mm(const DefectKind& kind);
std::string_view kind_name(const DefectKind& kind);

class Oru {
 public:
  /// Throws InvalidArgument for an empty patch list or duplicate patch ids.
  /// The bounding box is centered on the pose origin, extents along the ORU axes.
  Oru(std::string id, std::vector<SurfacePatch> patches, std::array<double, 3> bounding_box, Pose pose);

  const std::string& id() const { return id_; }
  const std::vector<SurfacePatch>& patches() const { return patches_; }
  const std::array<double, 3>& bounding_box() const { return bounding_box_; }
  const Pose& pose() const { return pose_; }

 private:
  std::string id_;
  std::vector<SurfacePatch> patches_;
  std::array<double, 3> bounding_box_;
  Pose pose_;
};

/// Sum of patch areas (m²).
double external_area(const Oru& oru);

/// Box ORU of the given size centered on its pose origin, one outward-facing
/// patch per face named `<id>:+x`, `<id>:-x`, ... `<id>:-z`.
Oru make_box_oru(std::string id, const Vec3& size, const Pose& pose = {});

/// Read-only view of one patch with its world frame and the defects on it.
struct PatchView {
  const SurfacePatch* patch = nullptr;
  Pose world;  // patch frame in world coordinates
  std::vector<const Defect*> defects;

  double height_mm(const Vec2& uv) const;
  double temperature_c(const Vec2& uv) const;
  Vec3 normal() const { return world.rotate(Vec3::UnitZ()); }
  Vec3 point(const Vec2& uv) const { return world.apply(Vec3(uv.x(), uv.y(), 0.0)); }
};

class WarehouseScene {
 public:
  WarehouseScene() = default;
  /// Validates ids, patch geometry and defect references.
  WarehouseScene(std::vector<FixturePoint> fixtures, std::vector<Oru> orus,
                 std::vector<SurfacePatch> structure_patches, std::vector<Defect> defects,
                 double ambient_temperature);

  const std::vector<FixturePoint>& fixtures() const { return fixtures_; }
  const std::vector<Oru>& orus() const { return orus_; }
  const std::vector<SurfacePatch>& structure_patches() const { return structure_patches_; }
  const std::vector<Defect>& defects() const { return defects_; }
  double ambient_temperature() const { return ambient_temperature_; }

  bool has_patch(std::string_view id) const;
  /// Throws UnknownPatch.
  const SurfacePatch& patch(std::string_view id) const;
  /// Patch frame composed with its owning ORU pose. Throws UnknownPatch.
  Pose patch_world_frame(std::string_view id) const;
  PatchView view(std::string_view patch_id) const;

  /// Throws UnknownFixture.
  const FixturePoint& fixture(std::string_view id) const;
  /// Throws InvalidArgument when the ORU does not exist.
  const Oru& oru(std::string_view id) const;

  /// Same contract as add_defect().
  WarehouseScene with_defect(Defect defect) const;

 private:
  struct PatchRef {
    int oru = -1;  // -1: structure patch
    std::size_t index = 0;
  };
  void index();
  const PatchRef& ref(std::string_view id) const;

  std::vector<FixturePoint> fixtures_;
  std::vector<Oru> orus_;
  std::vector<SurfacePatch> structure_patches_;
  std::vector<Defect> defects_;
  double ambient_temperature_ = 20.0;
  std::unordered_map<std::string, PatchRef> patch_index_;
};

/// Returns a copy with `defect` appended. Errors: UnknownPatch, OutOfBounds.
WarehouseScene add_defect(const WarehouseScene& scene, Defect defect);
/// Signed height (mm) relative to the nominal plane. Errors: UnknownPatch, OutOfBounds.
double surface_height(const WarehouseScene& scene, std::string_view patch_id, const Vec2& uv);
/// Surface temperature (°C). Errors: UnknownPatch.
double surface_temperature(const WarehouseScene& scene, std::string_view patch_id, const Vec2& uv);

}  // namespace mim
