#pragma once

#include "lidarsynth/annotator.hpp"
#include "lidarsynth/kitti_io.hpp"
#include "lidarsynth/lidar.hpp"
#include "lidarsynth/render.hpp"
#include "lidarsynth/scene.hpp"

namespace lidarsynth {

struct FrameOptions {
  LidarConfig lidar;
  LabelOptions labels;
  bool color = true;  // also produce the shaded preview image
  int workers = 0;
};

struct ProcessedFrame {
  RenderedFrame rendered;  // rendered.instance is the renderer's ground truth
  FrameArtifacts artifacts;  // artifacts.instance is the reconstructed segmentation
};

/// Renders the scene, reconstructs instances from depth + stencil + boxes,
/// scans the point cloud against the reconstructed instance image and
/// builds the labels and calibration.
ProcessedFrame process_frame(const Scene& scene, const Camera& camera,
                             const FrameOptions& options);

}  // namespace lidarsynth
