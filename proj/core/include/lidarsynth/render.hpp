#pragma once

#include <cstddef>

#include "lidarsynth/depth_buffer.hpp"
#include "lidarsynth/scene.hpp"

namespace lidarsynth {

struct RenderedFrame {
  DepthBuffer depth;
  /// Ground-truth per-pixel entity ID (or background stencil code).
  SegmentationImage instance;
  /// Class-wise stencil: object-class codes on entities, background codes elsewhere.
  SegmentationImage stencil;
};

/// Casts the ray through every pixel centre against the detailed geometry.
/// Geometry nearer than the near plane or beyond the far plane is clipped;
/// misses store depth 0 and the sky code. Output does not depend on `workers`
/// (0 = hardware concurrency).
RenderedFrame render(const Scene& scene, const Camera& camera, int workers = 0);

/// Pixel rectangle, inclusive on both ends.
struct PixelRect {
  int u0 = 0;
  int v0 = 0;
  int u1 = -1;
  int v1 = -1;
};

/// Counts pixels inside `region` where `entity` would be visible if it were
/// alone in the scene.
std::size_t render_solo_pixel_count(const Entity& entity, const Camera& camera,
                                    const PixelRect& region);

/// 8-bit RGB preview: flat colour per class or entity, darkened with range.
struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
};

ColorImage shade_preview(const RenderedFrame& frame, const Camera& camera);

}  // namespace lidarsynth
