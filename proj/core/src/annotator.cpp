#include "lidarsynth/annotator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lidarsynth/error.hpp"
#include "lidarsynth/render.hpp"

namespace lidarsynth {

LooseBox project_box_2d(const OrientedBox3D& box, const Camera& camera) {
  LooseBox out;
  double umin = std::numeric_limits<double>::infinity();
  double vmin = umin;
  double umax = -umin;
  double vmax = -umin;
  int in_front = 0;
  for (const Vec3& c : box.corners()) {
    if (c.z() <= 0.0) {
      out.partly_behind = true;
      continue;
    }
    ++in_front;
    const PixelCoord p = project(c, camera);
    umin = std::min(umin, p.u);
    umax = std::max(umax, p.u);
    vmin = std::min(vmin, p.v);
    vmax = std::max(vmax, p.v);
  }
  if (in_front == 0) throw InvalidArgument("box lies entirely behind the camera");
  out.unclipped = {umin, vmin, umax, vmax};
  const double wmax = camera.width() - 1.0;
  const double hmax = camera.height() - 1.0;
  out.outside = umax < 0.0 || vmax < 0.0 || umin > wmax || vmin > hmax;
  out.clipped = {std::clamp(umin, 0.0, wmax), std::clamp(vmin, 0.0, hmax),
                 std::clamp(umax, 0.0, wmax), std::clamp(vmax, 0.0, hmax)};
  return out;
}

SegmentationImage segment_instances(const DepthBuffer& buffer, const SegmentationImage& stencil,
                                    const Camera& camera, const Scene& scene) {
  const int w = camera.width();
  const int h = camera.height();
  if (!buffer.same_shape(w, h) || !stencil.same_shape(w, h)) {
    throw InvalidArgument("segment_instances: image dimensions differ from camera");
  }
  std::vector<OrientedBox3D> inflated;
  inflated.reserve(scene.entities.size());
  for (const Entity& e : scene.entities) inflated.push_back(e.box.inflated(kSegmentBoxMargin));

  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> range(n, 0.0);
  SegmentationImage out = stencil;
  std::vector<char> resolved(n, 1);

  // Step 1: box containment.
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      const auto cls = object_class_of_stencil(stencil.at(u, v));
      if (!cls) continue;
      range[i] = decode_depth({u, v}, buffer, camera);
      const Vec3 p = unproject({double(u), double(v)}, range[i], camera);
      EntityId found = 0;
      int matches = 0;
      for (std::size_t k = 0; k < scene.entities.size(); ++k) {
        if (scene.entities[k].cls != *cls) continue;
        if (point_in_oriented_box(p, inflated[k])) {
          found = scene.entities[k].id;
          ++matches;
        }
      }
      if (matches == 1) {
        out.at(u, v) = found;
      } else {
        resolved[i] = 0;
      }
    }
  }

  // Step 2: flood fill over object pixels; only groups with an unresolved
  // pixel need a vote.
  std::vector<char> visited(n, 0);
  std::vector<std::size_t> group;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (visited[seed] || resolved[seed]) continue;
    const std::uint32_t code = stencil.values()[seed];
    group.clear();
    stack.assign(1, seed);
    visited[seed] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      group.push_back(i);
      const int u = static_cast<int>(i % w);
      const int v = static_cast<int>(i / w);
      const int du[4] = {1, -1, 0, 0};
      const int dv[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int nu = u + du[k];
        const int nv = v + dv[k];
        if (nu < 0 || nv < 0 || nu >= w || nv >= h) continue;
        const std::size_t j = static_cast<std::size_t>(nv) * w + nu;
        if (visited[j] || stencil.values()[j] != code) continue;
        const double a = range[i];
        const double b = range[j];
        if (std::abs(a - b) >= kSegmentDisparity * std::min(a, b)) continue;
        visited[j] = 1;
        stack.push_back(j);
      }
    }
    std::map<EntityId, std::size_t> votes;
    for (std::size_t i : group) {
      if (resolved[i]) ++votes[out.values()[i]];
    }
    if (votes.empty()) continue;
    EntityId winner = 0;
    std::size_t best = 0;
    for (const auto& [id, count] : votes) {
      if (count > best) {
        best = count;
        winner = id;
      }
    }
    for (std::size_t i : group) {
      if (!resolved[i]) out.values()[i] = winner;
    }
  }
  return out;
}

std::map<EntityId, MaskStats> mask_stats(const SegmentationImage& instance) {
  std::map<EntityId, MaskStats> out;
  for (int v = 0; v < instance.height(); ++v) {
    for (int u = 0; u < instance.width(); ++u) {
      const std::uint32_t code = instance.at(u, v);
      if (!is_entity_code(code)) continue;
      auto [it, fresh] = out.try_emplace(code);
      MaskStats& s = it->second;
      if (fresh) {
        s.extent = {double(u), double(v), double(u), double(v)};
      } else {
        s.extent.left = std::min(s.extent.left, double(u));
        s.extent.right = std::max(s.extent.right, double(u));
        s.extent.top = std::min(s.extent.top, double(v));
        s.extent.bottom = std::max(s.extent.bottom, double(v));
      }
      ++s.pixels;
    }
  }
  return out;
}

namespace {

std::optional<Box2D> intersect_outward(const Box2D& mask, const Box2D& loose) {
  const Box2D r{std::max(mask.left, std::floor(loose.left)),
                std::max(mask.top, std::floor(loose.top)),
                std::min(mask.right, std::ceil(loose.right)),
                std::min(mask.bottom, std::ceil(loose.bottom))};
  if (r.left > r.right || r.top > r.bottom) return std::nullopt;
  return r;
}

}  // namespace

std::optional<Box2D> tighten_box(const Box2D& loose, const SegmentationImage& instance,
                                 EntityId id) {
  std::optional<Box2D> mask;
  for (int v = 0; v < instance.height(); ++v) {
    for (int u = 0; u < instance.width(); ++u) {
      if (instance.at(u, v) != id) continue;
      if (!mask) {
        mask = Box2D{double(u), double(v), double(u), double(v)};
        continue;
      }
      mask->left = std::min(mask->left, double(u));
      mask->right = std::max(mask->right, double(u));
      mask->top = std::min(mask->top, double(v));
      mask->bottom = std::max(mask->bottom, double(v));
    }
  }
  if (!mask) return std::nullopt;
  return intersect_outward(*mask, loose);
}

double compute_truncation(const OrientedBox3D& box, const Camera& camera) {
  LooseBox loose;
  try {
    loose = project_box_2d(box, camera);
  } catch (const InvalidArgument&) {
    return 1.0;
  }
  if (loose.outside) return 1.0;
  const double full = loose.unclipped.area();
  if (full <= 0.0) return 0.0;
  return std::clamp(1.0 - loose.clipped.area() / full, 0.0, 1.0);
}

int compute_occlusion(std::size_t visible_pixels, std::size_t solo_pixels,
                      const OcclusionThresholds& thresholds) {
  if (solo_pixels == 0) throw InvalidArgument("entity has no pixels when rendered alone");
  const double ratio = static_cast<double>(visible_pixels) / static_cast<double>(solo_pixels);
  if (ratio >= thresholds.fully_visible) return 0;
  if (ratio >= thresholds.partly) return 1;
  if (ratio > 0.0) return 2;
  return 3;
}

FrameLabels make_labels(const Scene& scene, const Camera& camera,
                        const SegmentationImage& instance, const LabelOptions& options) {
  FrameLabels out;
  const auto stats = mask_stats(instance);
  std::vector<const Entity*> ordered;
  for (const Entity& e : scene.entities) ordered.push_back(&e);
  std::sort(ordered.begin(), ordered.end(),
            [](const Entity* a, const Entity* b) { return a->id < b->id; });
  out.report.entities = ordered.size();

  for (const Entity* e : ordered) {
    const auto it = stats.find(e->id);
    if (it == stats.end()) {
      ++out.report.skipped;
      continue;
    }
    const MaskStats& mask = it->second;
    const LooseBox loose = project_box_2d(e->box, camera);
    const Box2D tight = intersect_outward(mask.extent, loose.unclipped).value_or(mask.extent);

    ObjectLabel label;
    label.bbox = tight;
    ExtendedLabel ext{e->id, mask.pixels, e->speed, e->model, e->box.pitch, e->box.roll};

    if (mask.pixels < options.min_pixels) {
      label.type = kDontCare;
      label.truncated = -1.0;
      label.occluded = -1;
      label.alpha = -10.0;
      label.h = label.w = label.l = -1.0;
      label.location = Vec3(-1000.0, -1000.0, -1000.0);
      label.rotation_y = -10.0;
      ++out.report.dont_care;
    } else {
      label.type = std::string(to_string(e->cls));
      label.truncated = compute_truncation(e->box, camera);
      const PixelRect region{static_cast<int>(std::floor(loose.clipped.left)),
                             static_cast<int>(std::floor(loose.clipped.top)),
                             static_cast<int>(std::ceil(loose.clipped.right)),
                             static_cast<int>(std::ceil(loose.clipped.bottom))};
      const std::size_t solo = render_solo_pixel_count(*e, camera, region);
      label.occluded = solo == 0 ? 3 : compute_occlusion(mask.pixels, solo, options.occlusion);
      label.h = e->box.h;
      label.w = e->box.w;
      label.l = e->box.l;
      label.location = e->box.bottom_center();
      label.rotation_y = wrap_angle(e->box.yaw);
      label.alpha = wrap_angle(label.rotation_y - std::atan2(label.location.x(), label.location.z()));
      ++out.report.labeled;
    }
    out.labels.push_back(std::move(label));
    out.extended.push_back(std::move(ext));
  }
  return out;
}

}  // namespace lidarsynth
