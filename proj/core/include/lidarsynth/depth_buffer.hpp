#pragma once

// Nonlinear depth-buffer codec and disparity-gated sampling.

#include <cstdint>
#include <vector>

#include "lidarsynth/error.hpp"
#include "lidarsynth/geometry.hpp"

namespace lidarsynth {

/// Row-major image of W x H values.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(checked(width, height)), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  T& at(int u, int v) { return data_[index(u, v)]; }
  const T& at(int u, int v) const { return data_[index(u, v)]; }
  T& operator[](Pixel p) { return at(p.u, p.v); }
  const T& operator[](Pixel p) const { return at(p.u, p.v); }

  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool same_shape(int width, int height) const { return width_ == width && height_ == height; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  static long checked(int w, int h) {
    if (w < 0 || h < 0) throw InvalidArgument("grid dimensions must be non-negative");
    return static_cast<long>(w) * h;
  }
  std::size_t index(int u, int v) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Nonlinear depth values in [0, 1]; 0 is the far limit.
using DepthBuffer = Grid<float>;
/// Per-pixel entity IDs or stencil codes (see classes.hpp).
using SegmentationImage = Grid<std::uint32_t>;

/// Distance from the optical centre to the pixel's point on the near
/// clipping plane (d_nc).
double near_plane_distance(PixelCoord px, const Camera& camera);

/// Decodes a raw buffer value into the range along the pixel's ray:
/// d = d_nc / (D + nc_z * d_nc / (2 * fc_z)).
/// Throws CorruptBuffer when the denominator is not positive.
double decode_depth(double value, PixelCoord px, const Camera& camera);
double decode_depth(Pixel px, const DepthBuffer& buffer, const Camera& camera);

/// Exact inverse of decode_depth: D = d_nc / range - nc_z * d_nc / (2 * fc_z),
/// clamped below at 0 (ranges past the representable far limit).
/// Throws InvalidArgument when range < nc_z.
///
/// Ranges shorter than the pixel's own near-plane distance (only possible
/// off-axis, within d_nc of the sensor) encode above 1 and still round-trip;
/// the renderer clips such geometry so buffers stay within [0, 1].
double encode_depth(double range, PixelCoord px, const Camera& camera);

/// Bilinear blend over the unit square. Corners are ordered by integer
/// coordinate: (u0,v0), (u0+1,v0), (u0,v0+1), (u0+1,v0+1).
double bilinear_interpolate(double d00, double d10, double d01, double d11, double frac_u,
                            double frac_v);

struct DepthSample {
  double range = 0.0;        // metres along the query ray
  std::uint32_t label = 0;   // segmentation value at the nearest pixel
  Pixel nearest;             // GetNear's first pixel
  bool interpolated = false; // false when the disparity gate fell back to the nearest pixel
};

inline constexpr double kDefaultGateRatio = 1.08;

/// Decodes the four pixels around `px`; blends them bilinearly when
/// max < gate_ratio * min, otherwise returns the nearest pixel's range.
DepthSample gated_sample(PixelCoord px, const DepthBuffer& buffer, const SegmentationImage& seg,
                         const Camera& camera, double gate_ratio = kDefaultGateRatio);

}  // namespace lidarsynth
