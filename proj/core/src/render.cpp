#include "lidarsynth/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lidarsynth/parallel.hpp"
#include "scene_internal.hpp"

namespace lidarsynth {

namespace {

// Valid ray interval for a pixel: from the near plane to the far plane.
struct ClipInterval {
  double t_min;
  double t_max;
};

ClipInterval clip_interval(PixelCoord px, const Vec3& dir, const Camera& camera) {
  return {near_plane_distance(px, camera), camera.far_clip() / dir.z()};
}

}  // namespace

RenderedFrame render(const Scene& scene, const Camera& camera, int workers) {
  const int w = camera.width();
  const int h = camera.height();
  RenderedFrame out{DepthBuffer(w, h, 0.0f), SegmentationImage(w, h, kSkyCode),
                    SegmentationImage(w, h, kSkyCode)};
  const detail::PreparedScene prepared = detail::prepare(scene);

  parallel_for_chunks(static_cast<std::size_t>(h), workers, [&](std::size_t v0, std::size_t v1) {
    for (int v = static_cast<int>(v0); v < static_cast<int>(v1); ++v) {
      for (int u = 0; u < w; ++u) {
        const PixelCoord px{double(u), double(v)};
        const Vec3 dir = pixel_direction(px, camera);
        const ClipInterval clip = clip_interval(px, dir, camera);
        RaycastOptions opts;
        opts.t_min = clip.t_min;
        opts.t_max = clip.t_max;
        const auto hit = detail::raycast(prepared, Ray{Vec3::Zero(), dir}, opts);
        if (!hit) continue;
        const double value = std::clamp(encode_depth(hit->range, px, camera), 0.0, 1.0);
        out.depth.at(u, v) = static_cast<float>(value);
        out.instance.at(u, v) = hit->label;
        if (hit->is_entity()) {
          out.stencil.at(u, v) = stencil_code(scene.find(hit->label)->cls);
        } else {
          out.stencil.at(u, v) = hit->label;
        }
      }
    }
  });
  return out;
}

std::size_t render_solo_pixel_count(const Entity& entity, const Camera& camera,
                                    const PixelRect& region) {
  Scene solo;
  solo.entities.push_back(entity);
  const detail::PreparedScene prepared = detail::prepare(solo);
  const detail::PreparedEntity& pe = prepared.entities.front();

  const int u0 = std::max(region.u0, 0);
  const int v0 = std::max(region.v0, 0);
  const int u1 = std::min(region.u1, camera.width() - 1);
  const int v1 = std::min(region.v1, camera.height() - 1);
  std::size_t count = 0;
  for (int v = v0; v <= v1; ++v) {
    for (int u = u0; u <= u1; ++u) {
      const PixelCoord px{double(u), double(v)};
      const Vec3 dir = pixel_direction(px, camera);
      const ClipInterval clip = clip_interval(px, dir, camera);
      if (detail::raycast_entity(pe, Ray{Vec3::Zero(), dir}, clip.t_min, clip.t_max, false)) {
        ++count;
      }
    }
  }
  return count;
}

namespace {

std::array<std::uint8_t, 3> base_color(std::uint32_t stencil, std::uint32_t instance) {
  if (auto cls = object_class_of_stencil(stencil)) {
    static constexpr std::array<std::array<std::uint8_t, 3>, 12> kObject = {{
        {200, 40, 40}, {230, 200, 40}, {240, 120, 30}, {150, 40, 160}, {200, 160, 60},
        {220, 80, 140}, {120, 60, 160}, {60, 80, 200}, {100, 100, 140}, {200, 200, 220},
        {40, 160, 200}, {140, 90, 50},
    }};
    auto c = kObject[static_cast<int>(*cls)];
    // Per-instance tint so neighbouring objects of one class stay distinct.
    const int tint = static_cast<int>((instance * 2654435761u) >> 27) - 16;
    for (auto& ch : c) ch = static_cast<std::uint8_t>(std::clamp(int(ch) + tint, 0, 255));
    return c;
  }
  switch (stencil) {
    case stencil_code(StencilClass::Ground): return {90, 90, 90};
    case stencil_code(StencilClass::Building): return {150, 120, 100};
    case stencil_code(StencilClass::Wall): return {170, 170, 160};
    case stencil_code(StencilClass::Vegetation): return {60, 130, 60};
    default: return {135, 180, 235};
  }
}

}  // namespace

ColorImage shade_preview(const RenderedFrame& frame, const Camera& camera) {
  ColorImage img{camera.width(), camera.height(), {}};
  img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  std::size_t k = 0;
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const std::uint32_t stencil = frame.stencil.at(u, v);
      auto c = base_color(stencil, frame.instance.at(u, v));
      double shade = 1.0;
      if (stencil != kSkyCode) {
        const double range = decode_depth({u, v}, frame.depth, camera);
        shade = 1.0 / (1.0 + range / 80.0);
      }
      for (auto ch : c) img.rgb[k++] = static_cast<std::uint8_t>(std::lround(ch * shade));
    }
  }
  return img;
}

}  // namespace lidarsynth
