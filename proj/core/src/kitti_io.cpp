#include "lidarsynth/kitti_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lidarsynth/error.hpp"

namespace lidarsynth {

namespace {

void put_u32(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xFFu));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) {
    x |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return x;
}

float get_f32(std::string_view bytes, std::size_t offset) {
  return std::bit_cast<float>(get_u32(bytes, offset));
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream ss{std::string(line)};
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(value)) {
    throw FormatError(std::string("invalid ") + what + " '" + tok + "'");
  }
  return value;
}

template <typename Int>
Int parse_int(const std::string& tok, const char* what) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw FormatError(std::string("invalid ") + what + " '" + tok + "'");
  }
  return value;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
  }
  return lines;
}

constexpr char kDepthMagic[8] = {'L', 'S', 'D', 'E', 'P', 'T', 'H', '1'};
constexpr char kSegMagic[8] = {'L', 'S', 'S', 'E', 'G', 'M', '0', '1'};

template <typename T, typename Put>
std::string encode_grid(const Grid<T>& g, const char (&magic)[8], Put put) {
  std::string out(magic, 8);
  put_u32(out, static_cast<std::uint32_t>(g.width()));
  put_u32(out, static_cast<std::uint32_t>(g.height()));
  out.reserve(16 + g.size() * 4);
  for (const T& x : g.values()) put(out, x);
  return out;
}

template <typename T, typename Get>
Grid<T> decode_grid(const fs::path& path, const char (&magic)[8], Get get) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), magic, 8) != 0) {
    throw FormatError(path.string() + ": bad image header");
  }
  const std::uint32_t w = get_u32(bytes, 8);
  const std::uint32_t h = get_u32(bytes, 12);
  if (w > (1u << 16) || h > (1u << 16) ||
      bytes.size() != 16 + static_cast<std::size_t>(w) * h * 4) {
    throw FormatError(path.string() + ": size does not match header");
  }
  Grid<T> g(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] = get(bytes, 16 + 4 * i);
  return g;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <int R, int C>
std::string calib_line(const char* key, const Eigen::Matrix<double, R, C>& m) {
  std::string line = std::string(key) + ":";
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) line += " " + format_g17(m(r, c));
  }
  return line + "\n";
}

}  // namespace

Eigen::Vector3f camera_to_velodyne(const Eigen::Vector3f& p) {
  return {p.z(), -p.x(), -p.y()};
}

Eigen::Vector3f velodyne_to_camera(const Eigen::Vector3f& p) {
  return {-p.y(), -p.z(), p.x()};
}

void write_point_cloud(const PointCloud& cloud, const fs::path& bin, const fs::path& sidecar) {
  std::string points;
  std::string labels;
  points.reserve(cloud.size() * 16);
  labels.reserve(cloud.size() * 4);
  for (const LidarPoint& p : cloud.points) {
    const Eigen::Vector3f v = camera_to_velodyne(p.position);
    put_f32(points, v.x());
    put_f32(points, v.y());
    put_f32(points, v.z());
    put_f32(points, 0.0f);
    put_u32(labels, p.label);
  }
  write_file_atomic(bin, points);
  write_file_atomic(sidecar, labels);
}

PointCloud read_point_cloud(const fs::path& bin, const std::optional<fs::path>& sidecar) {
  const std::string bytes = read_file(bin);
  if (bytes.size() % 16 != 0) {
    throw FormatError(bin.string() + ": size is not a multiple of 16 bytes");
  }
  const std::size_t n = bytes.size() / 16;
  std::string labels;
  if (sidecar) {
    labels = read_file(*sidecar);
    if (labels.size() != n * 4) {
      throw FormatError(sidecar->string() + ": label count does not match point count");
    }
  }
  PointCloud cloud;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3f v(get_f32(bytes, 16 * i), get_f32(bytes, 16 * i + 4),
                            get_f32(bytes, 16 * i + 8));
    cloud.points[i].position = velodyne_to_camera(v);
    cloud.points[i].label = sidecar ? get_u32(labels, 4 * i) : 0u;
  }
  return cloud;
}

std::string format_fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  if (std::strcmp(buf, "-0.00") == 0) return "0.00";
  return buf;
}

std::string format_label_line(const ObjectLabel& l) {
  std::string s = l.type;
  auto add = [&s](double x) { s += ' ' + format_fixed2(x); };
  add(l.truncated);
  s += ' ' + std::to_string(l.occluded);
  add(l.alpha);
  add(l.bbox.left);
  add(l.bbox.top);
  add(l.bbox.right);
  add(l.bbox.bottom);
  add(l.h);
  add(l.w);
  add(l.l);
  add(l.location.x());
  add(l.location.y());
  add(l.location.z());
  add(l.rotation_y);
  return s;
}

ObjectLabel parse_label_line(std::string_view line) {
  const auto f = split_ws(line);
  if (f.size() != 15) {
    throw FormatError("label line has " + std::to_string(f.size()) + " fields, expected 15");
  }
  if (f[0] != kDontCare && !parse_object_class(f[0])) {
    throw FormatError("unknown object class '" + f[0] + "'");
  }
  ObjectLabel l;
  l.type = f[0];
  l.truncated = parse_double(f[1], "truncation");
  l.occluded = parse_int<int>(f[2], "occlusion");
  l.alpha = parse_double(f[3], "alpha");
  l.bbox = {parse_double(f[4], "bbox"), parse_double(f[5], "bbox"), parse_double(f[6], "bbox"),
            parse_double(f[7], "bbox")};
  l.h = parse_double(f[8], "height");
  l.w = parse_double(f[9], "width");
  l.l = parse_double(f[10], "length");
  l.location = Vec3(parse_double(f[11], "location"), parse_double(f[12], "location"),
                    parse_double(f[13], "location"));
  l.rotation_y = parse_double(f[14], "rotation_y");
  return l;
}

void write_labels(const std::vector<ObjectLabel>& labels, const fs::path& path) {
  std::string text;
  for (const auto& l : labels) text += format_label_line(l) + '\n';
  write_file_atomic(path, text);
}

std::vector<ObjectLabel> read_labels(const fs::path& path) {
  std::vector<ObjectLabel> out;
  for (const auto& line : read_lines(path)) {
    try {
      out.push_back(parse_label_line(line));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return out;
}

std::string format_extended_line(const ExtendedLabel& e) {
  return std::to_string(e.entity_id) + ' ' + std::to_string(e.pixel_count) + ' ' +
         format_fixed2(e.speed) + ' ' + e.model + ' ' + format_fixed2(e.pitch) + ' ' +
         format_fixed2(e.roll);
}

ExtendedLabel parse_extended_line(std::string_view line) {
  const auto f = split_ws(line);
  if (f.size() != 6) {
    throw FormatError("extended label line has " + std::to_string(f.size()) +
                      " fields, expected 6");
  }
  ExtendedLabel e;
  e.entity_id = parse_int<EntityId>(f[0], "entity id");
  e.pixel_count = parse_int<std::size_t>(f[1], "pixel count");
  e.speed = parse_double(f[2], "speed");
  e.model = f[3];
  e.pitch = parse_double(f[4], "pitch");
  e.roll = parse_double(f[5], "roll");
  return e;
}

void write_extended_labels(const std::vector<ExtendedLabel>& ext, const fs::path& path) {
  std::string text;
  for (const auto& e : ext) {
    if (e.model.empty() || e.model.find_first_of(" \t\r\n") != std::string::npos) {
      throw InvalidArgument("model name must be non-empty without whitespace");
    }
    text += format_extended_line(e) + '\n';
  }
  write_file_atomic(path, text);
}

std::vector<ExtendedLabel> read_extended_labels(const fs::path& path,
                                                std::optional<std::size_t> expected_count) {
  const auto lines = read_lines(path);
  if (expected_count && lines.size() != *expected_count) {
    throw FormatError(path.string() + ": " + std::to_string(lines.size()) +
                      " extended labels for " + std::to_string(*expected_count) + " labels");
  }
  std::vector<ExtendedLabel> out;
  for (const auto& line : lines) {
    try {
      out.push_back(parse_extended_line(line));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }
  return out;
}

Calibration make_calibration(const Camera& camera) {
  Calibration c;
  Matrix34 p = Matrix34::Zero();
  p(0, 0) = camera.focal_u();
  p(0, 2) = camera.center_u();
  p(1, 1) = camera.focal_v();
  p(1, 2) = camera.center_v();
  p(2, 2) = 1.0;
  c.P0 = c.P1 = c.P2 = c.P3 = p;
  c.R0_rect = Mat3::Identity();
  c.Tr_velo_to_cam = Matrix34::Zero();
  c.Tr_velo_to_cam(0, 1) = -1.0;
  c.Tr_velo_to_cam(1, 2) = -1.0;
  c.Tr_velo_to_cam(2, 0) = 1.0;
  c.Tr_imu_to_velo = Matrix34::Zero();
  c.Tr_imu_to_velo.leftCols<3>() = Mat3::Identity();
  return c;
}

PixelCoord project_velodyne(const Calibration& calib, const Vec3& velo) {
  const Vec3 cam = calib.R0_rect * (calib.Tr_velo_to_cam * velo.homogeneous());
  const Vec3 img = calib.P2 * cam.homogeneous();
  if (!(img.z() > 0.0)) throw InvalidArgument("point is behind the camera");
  return {img.x() / img.z(), img.y() / img.z()};
}

void write_calibration(const Calibration& c, const fs::path& path) {
  std::string text = calib_line("P0", c.P0) + calib_line("P1", c.P1) + calib_line("P2", c.P2) +
                     calib_line("P3", c.P3) + calib_line("R0_rect", c.R0_rect) +
                     calib_line("Tr_velo_to_cam", c.Tr_velo_to_cam) +
                     calib_line("Tr_imu_to_velo", c.Tr_imu_to_velo);
  write_file_atomic(path, text);
}

Calibration read_calibration(const fs::path& path) {
  Calibration c;
  int seen = 0;
  for (const auto& line : read_lines(path)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw FormatError(path.string() + ": missing ':'");
    const std::string key = line.substr(0, colon);
    const auto f = split_ws(std::string_view(line).substr(colon + 1));
    auto fill = [&](auto& m) {
      using M = std::decay_t<decltype(m)>;
      if (f.size() != static_cast<std::size_t>(M::RowsAtCompileTime * M::ColsAtCompileTime)) {
        throw FormatError(path.string() + ": wrong value count for " + key);
      }
      std::size_t k = 0;
      for (int r = 0; r < m.rows(); ++r) {
        for (int col = 0; col < m.cols(); ++col) m(r, col) = parse_double(f[k++], key.c_str());
      }
      ++seen;
    };
    if (key == "P0") fill(c.P0);
    else if (key == "P1") fill(c.P1);
    else if (key == "P2") fill(c.P2);
    else if (key == "P3") fill(c.P3);
    else if (key == "R0_rect") fill(c.R0_rect);
    else if (key == "Tr_velo_to_cam") fill(c.Tr_velo_to_cam);
    else if (key == "Tr_imu_to_velo") fill(c.Tr_imu_to_velo);
    else throw FormatError(path.string() + ": unknown key " + key);
  }
  if (seen != 7) throw FormatError(path.string() + ": incomplete calibration");
  return c;
}

void write_depth_buffer(const DepthBuffer& buffer, const fs::path& path) {
  write_file_atomic(path, encode_grid(buffer, kDepthMagic, put_f32));
}

DepthBuffer read_depth_buffer(const fs::path& path) {
  return decode_grid<float>(path, kDepthMagic, get_f32);
}

void write_segmentation(const SegmentationImage& image, const fs::path& path) {
  write_file_atomic(path, encode_grid(image, kSegMagic, put_u32));
}

SegmentationImage read_segmentation(const fs::path& path) {
  return decode_grid<std::uint32_t>(path, kSegMagic, get_u32);
}

void write_ppm(const ColorImage& image, const fs::path& path) {
  if (image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw InvalidArgument("colour image size mismatch");
  }
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n255\n";
  out.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
  write_file_atomic(path, out);
}

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return buf;
}

const std::vector<std::string>& dataset_subdirs() {
  static const std::vector<std::string> dirs = {"image_2", "velodyne", "velodyne_ids",
                                                "label_2", "extended", "calib",
                                                "depth",   "seg",      "stencil"};
  return dirs;
}

void write_frame(const fs::path& root, std::size_t index, const FrameArtifacts& frame) {
  for (const auto& d : dataset_subdirs()) fs::create_directories(root / d);
  const std::string name = frame_name(index);
  write_point_cloud(frame.cloud, root / "velodyne" / (name + ".bin"),
                    root / "velodyne_ids" / (name + ".bin"));
  write_labels(frame.labels.labels, root / "label_2" / (name + ".txt"));
  write_extended_labels(frame.labels.extended, root / "extended" / (name + ".txt"));
  write_calibration(frame.calib, root / "calib" / (name + ".txt"));
  write_depth_buffer(frame.depth, root / "depth" / (name + ".bin"));
  write_segmentation(frame.instance, root / "seg" / (name + ".bin"));
  write_segmentation(frame.stencil, root / "stencil" / (name + ".bin"));
  if (frame.color) write_ppm(*frame.color, root / "image_2" / (name + ".ppm"));
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " into place");
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

OrientedBox3D box_from_label(const ObjectLabel& label) {
  return box_from_bottom_center(label.location, label.h, label.w, label.l, label.rotation_y);
}

}  // namespace lidarsynth
