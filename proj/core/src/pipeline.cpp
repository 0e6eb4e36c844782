#include "lidarsynth/pipeline.hpp"

namespace lidarsynth {

ProcessedFrame process_frame(const Scene& scene, const Camera& camera,
                             const FrameOptions& options) {
  validate_scene(scene);
  ProcessedFrame out;
  out.rendered = render(scene, camera, options.workers);
  FrameArtifacts& a = out.artifacts;
  a.depth = out.rendered.depth;
  a.stencil = out.rendered.stencil;
  a.instance = segment_instances(a.depth, a.stencil, camera, scene);
  a.cloud = generate_point_cloud(a.depth, a.instance, camera, options.lidar, options.workers);
  a.labels = make_labels(scene, camera, a.instance, options.labels);
  a.calib = make_calibration(camera);
  if (options.color) a.color = shade_preview(out.rendered, camera);
  return out;
}

}  // namespace lidarsynth
