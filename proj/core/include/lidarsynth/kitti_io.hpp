#pragma once

// On-disk formats: KITTI velodyne binaries, label and calibration text, plus
// the extended labels, entity-ID sidecars and raw depth/segmentation images.
// Byte layouts are documented in docs/data_format.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lidarsynth/annotator.hpp"
#include "lidarsynth/depth_buffer.hpp"
#include "lidarsynth/lidar.hpp"
#include "lidarsynth/render.hpp"

namespace lidarsynth {

namespace fs = std::filesystem;

// --- frames -----------------------------------------------------------------

/// Velodyne frame: x forward, y left, z up.
Eigen::Vector3f camera_to_velodyne(const Eigen::Vector3f& p);
Eigen::Vector3f velodyne_to_camera(const Eigen::Vector3f& p);

// --- point clouds ------------------------------------------------------------

/// 16 bytes per point (x, y, z, reflectance = 0 as little-endian float32) in
/// the velodyne frame; the sidecar holds one little-endian uint32 label per point.
void write_point_cloud(const PointCloud& cloud, const fs::path& bin, const fs::path& sidecar);

/// Throws FormatError when the binary is not a multiple of 16 bytes or the
/// sidecar length disagrees. Without a sidecar all labels are 0. Ray indices
/// are not stored and come back as kNoRay.
PointCloud read_point_cloud(const fs::path& bin, const std::optional<fs::path>& sidecar);

// --- labels ------------------------------------------------------------------

/// Fixed two-decimal formatting used by the text formats ("-0.00" becomes "0.00").
std::string format_fixed2(double value);

std::string format_label_line(const ObjectLabel& label);
/// Throws FormatError unless the line has exactly 15 fields with a known type.
ObjectLabel parse_label_line(std::string_view line);

void write_labels(const std::vector<ObjectLabel>& labels, const fs::path& path);
std::vector<ObjectLabel> read_labels(const fs::path& path);

/// "entity_id pixel_count speed model pitch roll"
std::string format_extended_line(const ExtendedLabel& ext);
ExtendedLabel parse_extended_line(std::string_view line);

void write_extended_labels(const std::vector<ExtendedLabel>& ext, const fs::path& path);
/// When `expected_count` is set, a different number of lines is a FormatError.
std::vector<ExtendedLabel> read_extended_labels(const fs::path& path,
                                                std::optional<std::size_t> expected_count = {});

// --- calibration -------------------------------------------------------------

using Matrix34 = Eigen::Matrix<double, 3, 4>;

struct Calibration {
  Matrix34 P0, P1, P2, P3;
  Mat3 R0_rect;
  Matrix34 Tr_velo_to_cam;
  Matrix34 Tr_imu_to_velo;

  friend bool operator==(const Calibration& a, const Calibration& b) {
    return a.P0 == b.P0 && a.P1 == b.P1 && a.P2 == b.P2 && a.P3 == b.P3 &&
           a.R0_rect == b.R0_rect && a.Tr_velo_to_cam == b.Tr_velo_to_cam &&
           a.Tr_imu_to_velo == b.Tr_imu_to_velo;
  }
};

/// All four P matrices equal the camera intrinsics (one co-located camera);
/// R0_rect and Tr_imu_to_velo are identities, Tr_velo_to_cam the axis permutation.
Calibration make_calibration(const Camera& camera);

/// Pixel of a velodyne-frame point via Tr_velo_to_cam, R0_rect and P2.
PixelCoord project_velodyne(const Calibration& calib, const Vec3& velo);

void write_calibration(const Calibration& calib, const fs::path& path);
Calibration read_calibration(const fs::path& path);

// --- images ------------------------------------------------------------------

/// 16-byte header (8-byte magic, uint32 W, uint32 H) then row-major float32.
void write_depth_buffer(const DepthBuffer& buffer, const fs::path& path);
DepthBuffer read_depth_buffer(const fs::path& path);

/// Same header layout with a different magic, then row-major uint32.
void write_segmentation(const SegmentationImage& image, const fs::path& path);
SegmentationImage read_segmentation(const fs::path& path);

/// Binary PPM (P6).
void write_ppm(const ColorImage& image, const fs::path& path);

// --- dataset layout ----------------------------------------------------------

/// "000042"
std::string frame_name(std::size_t index);

/// Subdirectories of a dataset root, in creation order.
const std::vector<std::string>& dataset_subdirs();

struct FrameArtifacts {
  PointCloud cloud;
  FrameLabels labels;
  Calibration calib;
  DepthBuffer depth;
  SegmentationImage instance;
  SegmentationImage stencil;
  std::optional<ColorImage> color;
};

/// Writes every artifact of one frame under `root` (creating subdirectories).
/// Each file is written to a temporary sibling and renamed into place.
void write_frame(const fs::path& root, std::size_t index, const FrameArtifacts& frame);

/// Writes `bytes` atomically (temporary file + rename).
void write_file_atomic(const fs::path& path, std::string_view bytes);
std::string read_file(const fs::path& path);

/// Yaw-only box described by a KITTI label.
OrientedBox3D box_from_label(const ObjectLabel& label);

}  // namespace lidarsynth
