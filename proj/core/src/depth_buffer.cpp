#include "lidarsynth/depth_buffer.hpp"

#include <algorithm>
#include <cmath>

namespace lidarsynth {

double near_plane_distance(PixelCoord px, const Camera& camera) {
  const ClipPlaneDims clip = camera.clip_plane();
  // Normalised by the pixel extent (W-1, H-1) and scaled by the near-plane
  // size in metres, so the image centre maps to the optical axis.
  const double nc_x = std::abs(2.0 * px.u / (camera.width() - 1) - 1.0) * 0.5 * clip.width;
  const double nc_y = std::abs(2.0 * px.v / (camera.height() - 1) - 1.0) * 0.5 * clip.height;
  const double nc_z = camera.near_clip();
  return std::sqrt(nc_x * nc_x + nc_y * nc_y + nc_z * nc_z);
}

namespace {

double far_term(double d_nc, const Camera& camera) {
  return camera.near_clip() * d_nc / (2.0 * camera.far_clip());
}

}  // namespace

double decode_depth(double value, PixelCoord px, const Camera& camera) {
  const double d_nc = near_plane_distance(px, camera);
  const double denom = value + far_term(d_nc, camera);
  if (!(denom > 0.0)) {
    throw CorruptBuffer("decode_depth: buffer value " + std::to_string(value) +
                        " yields a non-positive denominator");
  }
  return d_nc / denom;
}

double decode_depth(Pixel px, const DepthBuffer& buffer, const Camera& camera) {
  return decode_depth(static_cast<double>(buffer[px]), PixelCoord{double(px.u), double(px.v)},
                      camera);
}

double encode_depth(double range, PixelCoord px, const Camera& camera) {
  if (!(range >= camera.near_clip())) {
    throw InvalidArgument("encode_depth: range " + std::to_string(range) +
                          " is closer than the near clipping plane");
  }
  const double d_nc = near_plane_distance(px, camera);
  return std::max(0.0, d_nc / range - far_term(d_nc, camera));
}

double bilinear_interpolate(double d00, double d10, double d01, double d11, double frac_u,
                            double frac_v) {
  // Weighted form so grid nodes reproduce their values exactly.
  const double top = (1.0 - frac_u) * d00 + frac_u * d10;
  const double bottom = (1.0 - frac_u) * d01 + frac_u * d11;
  return (1.0 - frac_v) * top + frac_v * bottom;
}

DepthSample gated_sample(PixelCoord px, const DepthBuffer& buffer, const SegmentationImage& seg,
                         const Camera& camera, double gate_ratio) {
  const NearSquare sq = get_near(px, camera);

  const Pixel b = sq.base;
  const double d00 = decode_depth(b, buffer, camera);
  const double d10 = decode_depth({b.u + 1, b.v}, buffer, camera);
  const double d01 = decode_depth({b.u, b.v + 1}, buffer, camera);
  const double d11 = decode_depth({b.u + 1, b.v + 1}, buffer, camera);

  const double lo = std::min({d00, d10, d01, d11});
  const double hi = std::max({d00, d10, d01, d11});

  DepthSample out;
  out.nearest = sq.nearest();
  out.label = seg[out.nearest];
  if (hi < gate_ratio * lo) {
    out.range = bilinear_interpolate(d00, d10, d01, d11, sq.frac_u, sq.frac_v);
    out.interpolated = true;
  } else {
    out.range = decode_depth(out.nearest, buffer, camera);
  }
  return out;
}

}  // namespace lidarsynth
