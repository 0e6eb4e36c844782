#pragma once

// Per-frame object annotation: instance segmentation, 2D boxes, KITTI fields
// and the extended per-object record.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lidarsynth/depth_buffer.hpp"
#include "lidarsynth/geometry.hpp"
#include "lidarsynth/scene.hpp"

namespace lidarsynth {

/// Axis-aligned image rectangle in pixel coordinates.
struct Box2D {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double width() const { return right - left; }
  double height() const { return bottom - top; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
  friend bool operator==(const Box2D&, const Box2D&) = default;
};

struct LooseBox {
  Box2D unclipped;  // min/max over the projected corners in front of the camera
  Box2D clipped;    // intersected with [0, W-1] x [0, H-1]
  bool partly_behind = false;  // some corners have z <= 0
  bool outside = false;        // unclipped box misses the image entirely
};

/// Throws InvalidArgument when every corner lies behind the camera.
LooseBox project_box_2d(const OrientedBox3D& box, const Camera& camera);

/// Relative range difference below which neighbouring pixels are grouped.
inline constexpr double kSegmentDisparity = 0.08;
/// Inflation applied to boxes when assigning pixels in step 1 (metres).
inline constexpr double kSegmentBoxMargin = 0.01;

/// Two-step instance segmentation from the depth buffer, the class stencil
/// and the scene's entity boxes.
///
/// Step 1 unprojects each object pixel and assigns it to the unique box of
/// the same class that contains it. Step 2 groups 4-connected pixels of equal
/// stencil whose ranges differ by less than 8 % and gives pixels left
/// unresolved by step 1 the group's majority entity (ties: smaller ID).
/// Groups without any step-1 assignment keep their stencil code.
SegmentationImage segment_instances(const DepthBuffer& buffer, const SegmentationImage& stencil,
                                    const Camera& camera, const Scene& scene);

struct MaskStats {
  Box2D extent;  // inclusive pixel indices
  std::size_t pixels = 0;
};

/// Extent and pixel count of every entity present in an instance image.
std::map<EntityId, MaskStats> mask_stats(const SegmentationImage& instance);

/// Min/max pixel indices of the entity's mask, intersected with the loose box
/// rounded outward. nullopt when the mask is empty or misses the loose box.
std::optional<Box2D> tighten_box(const Box2D& loose, const SegmentationImage& instance,
                                 EntityId id);

/// 1 - clipped / unclipped projected area; 1 when the box is behind the camera.
double compute_truncation(const OrientedBox3D& box, const Camera& camera);

struct OcclusionThresholds {
  double fully_visible = 0.95;
  double partly = 0.5;
};

/// KITTI occlusion level from visible / solo pixel ratio:
/// 0 when >= fully_visible, 1 when >= partly, 2 when > 0, otherwise 3.
/// Throws InvalidArgument when solo_pixels is 0.
int compute_occlusion(std::size_t visible_pixels, std::size_t solo_pixels,
                      const OcclusionThresholds& thresholds = {});

/// One KITTI label line.
struct ObjectLabel {
  std::string type;  // KITTI class name or "DontCare"
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  Box2D bbox;
  double h = 0.0;
  double w = 0.0;
  double l = 0.0;
  Vec3 location = Vec3::Zero();  // bottom centre, camera frame
  double rotation_y = 0.0;
};

inline constexpr const char* kDontCare = "DontCare";

/// Companion record written alongside each label line.
struct ExtendedLabel {
  EntityId entity_id = 0;
  std::size_t pixel_count = 0;
  double speed = 0.0;
  std::string model;
  double pitch = 0.0;
  double roll = 0.0;
};

struct LabelOptions {
  /// Entities with fewer instance pixels are labelled DontCare.
  std::size_t min_pixels = 50;
  OcclusionThresholds occlusion;
};

struct FrameReport {
  std::size_t entities = 0;
  std::size_t labeled = 0;
  std::size_t dont_care = 0;
  /// Entities without a single instance pixel (outside the frustum or hidden).
  std::size_t skipped = 0;
};

struct FrameLabels {
  std::vector<ObjectLabel> labels;
  std::vector<ExtendedLabel> extended;  // same order as labels
  FrameReport report;
};

/// Builds one label pair per entity visible in `instance`, ordered by entity ID.
FrameLabels make_labels(const Scene& scene, const Camera& camera,
                        const SegmentationImage& instance, const LabelOptions& options = {});

}  // namespace lidarsynth
