#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lidarsynth/error.hpp"
#include "lidarsynth/scene.hpp"

namespace lidarsynth {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("scene file: expected [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json shape_to_json(const Primitive& p) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return {{"type", "sphere"}, {"center", vec(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Capsule>) {
          return {{"type", "capsule"}, {"a", vec(s.a)}, {"b", vec(s.b)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          return {{"type", "cylinder"}, {"a", vec(s.a)}, {"b", vec(s.b)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Box>) {
          return {{"type", "box"}, {"min", vec(s.min)}, {"max", vec(s.max)}};
        } else if constexpr (std::is_same_v<T, Plane>) {
          return {{"type", "plane"}, {"normal", vec(s.normal)}, {"offset", s.offset}};
        } else {
          json tris = json::array();
          for (const Triangle& t : s.triangles) {
            tris.push_back(json::array({vec(t.a), vec(t.b), vec(t.c)}));
          }
          return {{"type", "mesh"}, {"triangles", tris}};
        }
      },
      p);
}

Primitive shape_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "sphere") return Sphere{vec(j.at("center")), j.at("radius").get<double>()};
  if (type == "capsule") {
    return Capsule{vec(j.at("a")), vec(j.at("b")), j.at("radius").get<double>()};
  }
  if (type == "cylinder") {
    return Cylinder{vec(j.at("a")), vec(j.at("b")), j.at("radius").get<double>()};
  }
  if (type == "box") return Box{vec(j.at("min")), vec(j.at("max"))};
  if (type == "plane") {
    const Vec3 n = vec(j.at("normal"));
    if (n.norm() == 0.0) throw FormatError("scene file: plane normal is zero");
    return Plane{n.normalized(), j.at("offset").get<double>() / n.norm()};
  }
  if (type == "mesh") {
    std::vector<Triangle> tris;
    for (const json& t : j.at("triangles")) {
      if (!t.is_array() || t.size() != 3) throw FormatError("scene file: triangle needs 3 vertices");
      tris.push_back({vec(t[0]), vec(t[1]), vec(t[2])});
    }
    return make_mesh(std::move(tris));
  }
  throw FormatError("scene file: unknown shape type '" + type + "'");
}

json shapes_to_json(const std::vector<Primitive>& shapes) {
  json out = json::array();
  for (const auto& s : shapes) out.push_back(shape_to_json(s));
  return out;
}

std::vector<Primitive> shapes_from_json(const json& j) {
  std::vector<Primitive> out;
  for (const json& s : j) out.push_back(shape_from_json(s));
  return out;
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
  json j;
  j["version"] = kSceneFileVersion;
  j["name"] = scene.name;
  json statics = json::array();
  for (const StaticElement& s : scene.statics) {
    statics.push_back({{"class", std::string(to_string(s.cls))}, {"shape", shape_to_json(s.shape)}});
  }
  j["statics"] = statics;
  json entities = json::array();
  for (const Entity& e : scene.entities) {
    json je;
    je["id"] = e.id;
    je["class"] = std::string(to_string(e.cls));
    je["model"] = e.model;
    je["speed"] = e.speed;
    je["center"] = vec(e.box.center);
    je["dimensions"] = json::array({e.box.h, e.box.w, e.box.l});
    je["yaw"] = e.box.yaw;
    je["pitch"] = e.box.pitch;
    je["roll"] = e.box.roll;
    je["detailed"] = shapes_to_json(e.detailed);
    if (e.proxy) je["proxy"] = shapes_to_json(*e.proxy);
    entities.push_back(je);
  }
  j["entities"] = entities;
  return j.dump(2);
}

Scene scene_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("scene file: ") + e.what());
  }
  try {
    const int version = j.at("version").get<int>();
    if (version != kSceneFileVersion) {
      throw FormatError("scene file: unsupported version " + std::to_string(version));
    }
    Scene scene;
    scene.name = j.value("name", std::string("custom"));
    for (const json& s : j.value("statics", json::array())) {
      const std::string cls = s.at("class").get<std::string>();
      auto parsed = parse_stencil_class(cls);
      if (!parsed) throw FormatError("scene file: unknown static class '" + cls + "'");
      scene.statics.push_back({shape_from_json(s.at("shape")), *parsed});
    }
    for (const json& je : j.value("entities", json::array())) {
      Entity e;
      e.id = je.at("id").get<EntityId>();
      const std::string cls = je.at("class").get<std::string>();
      auto parsed = parse_object_class(cls);
      if (!parsed) throw FormatError("scene file: unknown object class '" + cls + "'");
      e.cls = *parsed;
      e.model = je.value("model", std::string("unknown"));
      if (e.model.empty() || e.model.find_first_of(" \t\r\n") != std::string::npos) {
        throw FormatError("scene file: model names must be non-empty without whitespace");
      }
      e.speed = je.value("speed", 0.0);
      e.box.center = vec(je.at("center"));
      const json& dims = je.at("dimensions");
      if (!dims.is_array() || dims.size() != 3) {
        throw FormatError("scene file: dimensions must be [h, w, l]");
      }
      e.box.h = dims[0].get<double>();
      e.box.w = dims[1].get<double>();
      e.box.l = dims[2].get<double>();
      e.box.yaw = je.value("yaw", 0.0);
      e.box.pitch = je.value("pitch", 0.0);
      e.box.roll = je.value("roll", 0.0);
      e.detailed = shapes_from_json(je.at("detailed"));
      if (je.contains("proxy")) e.proxy = shapes_from_json(je.at("proxy"));
      scene.entities.push_back(std::move(e));
    }
    validate_scene(scene);
    return scene;
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
}

Scene load_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open scene file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scene_from_json(ss.str());
}

void save_scene_file(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write scene file " + path.string());
  out << scene_to_json(scene) << '\n';
}

}  // namespace lidarsynth
