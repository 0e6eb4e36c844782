#include "lidarsynth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "lidarsynth/error.hpp"

namespace lidarsynth {

namespace {

Plane plane_through(const Vec3& normal, const Vec3& point) {
  const Vec3 n = normal.normalized();
  return Plane{n, n.dot(point)};
}

StaticElement flat_ground() {
  return {plane_through(-Vec3::UnitY(), Vec3(0, kSensorHeight, 0)), StencilClass::Ground};
}

// Wheel with its axle along the local z axis.
Cylinder wheel(double x, double y, double z_inner, double z_outer, double radius) {
  return Cylinder{Vec3(x, y, z_inner), Vec3(x, y, z_outer), radius};
}

void add_wheel_pair(std::vector<Primitive>& shapes, double x, double radius, double half_h,
                    double half_w, double thickness) {
  const double y = half_h - radius;
  shapes.push_back(wheel(x, y, -half_w, -half_w + thickness, radius));
  shapes.push_back(wheel(x, y, half_w - thickness, half_w, radius));
}

Box full_box(const OrientedBox3D& b) {
  return Box{Vec3(-0.5 * b.l, -0.5 * b.h, -0.5 * b.w), Vec3(0.5 * b.l, 0.5 * b.h, 0.5 * b.w)};
}

double param(const SceneParams& params, std::set<std::string>& used, const std::string& key,
             double fallback) {
  used.insert(key);
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& items) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

}  // namespace

Entity make_car(EntityId id, const Vec3& bottom_center, double yaw, std::string model,
                double speed, double pitch, double roll) {
  Entity e;
  e.id = id;
  e.cls = ObjectClass::Car;
  e.model = std::move(model);
  e.speed = speed;
  e.box = box_from_bottom_center(bottom_center, 1.5, 1.8, 4.5, yaw, pitch, roll);

  // Local frame: +x front, y down (bottom at +0.75), z across.
  e.detailed.push_back(Box{Vec3(-2.25, -0.15, -0.9), Vec3(2.25, 0.45, 0.9)});
  e.detailed.push_back(make_prism(
      {{-1.6, -0.15}, {1.1, -0.15}, {0.4, -0.75}, {-1.3, -0.75}}, -0.8, 0.8));
  for (double x : {-1.45, 1.45}) add_wheel_pair(e.detailed, x, 0.33, 0.75, 0.9, 0.25);

  e.proxy = std::vector<Primitive>{Box{Vec3(-2.25, -0.75, -0.9), Vec3(2.25, 0.6, 0.9)}};
  return e;
}

Entity make_large_vehicle(EntityId id, ObjectClass cls, const Vec3& bottom_center, double yaw,
                          std::string model, double speed) {
  Entity e;
  e.id = id;
  e.cls = cls;
  e.model = std::move(model);
  e.speed = speed;
  double h = 3.2, w = 2.5, l = 7.5;
  if (cls == ObjectClass::Bus) {
    w = 2.6;
    l = 11.0;
  } else if (cls == ObjectClass::Trailer) {
    h = 3.6;
    l = 10.0;
  }
  e.box = box_from_bottom_center(bottom_center, h, w, l, yaw);
  const double hx = 0.5 * l, hy = 0.5 * h, hz = 0.5 * w;
  const double wheel_r = 0.5;

  if (cls == ObjectClass::Truck) {
    e.detailed.push_back(Box{Vec3(hx - 2.0, -hy + 0.8, -hz), Vec3(hx, hy - 0.5, hz)});
    e.detailed.push_back(Box{Vec3(-hx, -hy, -hz), Vec3(hx - 2.2, hy - 0.6, hz)});
    for (double x : {hx - 1.2, -hx + 1.5}) add_wheel_pair(e.detailed, x, wheel_r, hy, hz, 0.35);
  } else if (cls == ObjectClass::Bus) {
    e.detailed.push_back(Box{Vec3(-hx, -hy, -hz), Vec3(hx, hy - 0.35, hz)});
    for (double x : {hx - 2.2, -hx + 2.5}) add_wheel_pair(e.detailed, x, wheel_r, hy, hz, 0.35);
  } else {
    e.detailed.push_back(Box{Vec3(-hx, -hy, -hz), Vec3(hx, hy - 0.9, hz)});
    for (double x : {-hx + 1.2, -hx + 2.4}) add_wheel_pair(e.detailed, x, wheel_r, hy, hz, 0.35);
  }
  e.proxy = std::vector<Primitive>{full_box(e.box)};
  return e;
}

Entity make_pedestrian(EntityId id, const Vec3& bottom_center, double yaw, std::string model,
                       double speed) {
  Entity e;
  e.id = id;
  e.cls = ObjectClass::Pedestrian;
  e.model = std::move(model);
  e.speed = speed;
  e.box = box_from_bottom_center(bottom_center, 1.8, 0.6, 0.5, yaw);

  // Head, torso, pelvis and two legs in mid-stride; feet at y = +0.9.
  e.detailed.push_back(Sphere{Vec3(0.0, -0.77, 0.0), 0.12});
  e.detailed.push_back(Capsule{Vec3(0.0, -0.5, 0.0), Vec3(0.0, -0.1, 0.0), 0.17});
  e.detailed.push_back(Sphere{Vec3(0.0, 0.0, 0.0), 0.15});
  e.detailed.push_back(Capsule{Vec3(0.0, 0.05, -0.1), Vec3(0.12, 0.82, -0.1), 0.08});
  e.detailed.push_back(Capsule{Vec3(0.0, 0.05, 0.1), Vec3(-0.12, 0.82, 0.1), 0.08});

  e.proxy = std::vector<Primitive>{Cylinder{Vec3(0.0, -0.9, 0.0), Vec3(0.0, 0.9, 0.0), 0.25}};
  return e;
}

Entity make_cyclist(EntityId id, const Vec3& bottom_center, double yaw, std::string model,
                    double speed) {
  Entity e;
  e.id = id;
  e.cls = ObjectClass::Cyclist;
  e.model = std::move(model);
  e.speed = speed;
  e.box = box_from_bottom_center(bottom_center, 1.75, 0.6, 1.8, yaw);

  const double wheel_y = 0.875 - 0.34;
  for (double x : {-0.55, 0.55}) {
    e.detailed.push_back(Cylinder{Vec3(x, wheel_y, -0.02), Vec3(x, wheel_y, 0.02), 0.34});
  }
  e.detailed.push_back(Capsule{Vec3(-0.55, wheel_y, 0.0), Vec3(0.3, 0.1, 0.0), 0.03});
  e.detailed.push_back(Capsule{Vec3(-0.15, -0.15, 0.0), Vec3(0.15, -0.55, 0.0), 0.16});
  e.detailed.push_back(Sphere{Vec3(0.25, -0.7, 0.0), 0.11});
  e.detailed.push_back(Capsule{Vec3(-0.1, -0.05, -0.1), Vec3(0.0, 0.5, -0.12), 0.07});
  e.detailed.push_back(Capsule{Vec3(-0.1, -0.05, 0.1), Vec3(0.0, 0.5, 0.12), 0.07});

  e.proxy = std::vector<Primitive>{
      Box{Vec3(-0.9, 0.0, -0.1), Vec3(0.9, 0.875, 0.1)},
      Cylinder{Vec3(0.0, -0.875, 0.0), Vec3(0.0, 0.0, 0.0), 0.25},
  };
  return e;
}

Scene make_wall_scene(double z) {
  if (!(z > 0.0)) throw InvalidArgument("wall: z must be positive");
  Scene s;
  s.name = "wall";
  s.statics.push_back({plane_through(-Vec3::UnitZ(), Vec3(0, 0, z)), StencilClass::Wall});
  return s;
}

Scene make_two_plane_step_scene(double near_z, double ratio) {
  if (!(near_z > 0.0) || !(ratio > 1.0)) {
    throw InvalidArgument("two-plane-step: need near_z > 0 and ratio > 1");
  }
  Scene s;
  s.name = "two-plane-step";
  s.statics.push_back(
      {Box{Vec3(-1000.0, -1000.0, near_z), Vec3(0.0, 1000.0, near_z + 0.5)}, StencilClass::Wall});
  s.statics.push_back(
      {plane_through(-Vec3::UnitZ(), Vec3(0, 0, near_z * ratio)), StencilClass::Wall});
  return s;
}

Scene make_sphere_scene(double radius, double distance, double wall_z) {
  if (!(radius > 0.0) || !(distance > radius) || !(wall_z > distance + radius)) {
    throw InvalidArgument("sphere: need 0 < radius < distance and wall behind the sphere");
  }
  Scene s;
  s.name = "sphere";
  s.statics.push_back({Sphere{Vec3(0.0, 1.0, distance), radius}, StencilClass::Wall});
  s.statics.push_back({plane_through(-Vec3::UnitZ(), Vec3(0, 0, wall_z)), StencilClass::Wall});
  return s;
}

Scene make_street_basic_scene() {
  Scene s;
  s.name = "street-basic";
  s.statics.push_back(flat_ground());
  const double g = kSensorHeight;
  s.entities.push_back(make_car(1, Vec3(3.5, g, 10.0), -kPi / 2, "ingot", 8.0));
  s.entities.push_back(make_car(2, Vec3(-3.5, g, 35.0), -kPi / 2 + 0.3, "sedan_a", 12.5));
  s.entities.push_back(make_car(3, Vec3(1.5, g, 60.0), 0.0, "hatch_b", 0.0));
  s.entities.push_back(make_pedestrian(4, Vec3(-2.5, g, 8.0), 0.4, "walker_a", 1.2));
  s.entities.push_back(make_pedestrian(5, Vec3(-8.0, g, 14.0), -1.2, "walker_b", 0.0));
  s.entities.push_back(make_cyclist(6, Vec3(-5.5, g, 26.0), -kPi / 2, "bmx", 4.5));
  return s;
}

Scene make_slope_scene(double slope_deg, double start_z, double car_z) {
  if (!(slope_deg > 0.0 && slope_deg < 45.0) || !(start_z > 0.0) || !(car_z > start_z + 3.0)) {
    throw InvalidArgument("slope: need 0 < slope < 45 deg and the car on the incline");
  }
  Scene s;
  s.name = "slope";
  const double g = kSensorHeight;
  const double slope = deg_to_rad(slope_deg);
  const double far_z = 400.0;
  const double rise = std::tan(slope);
  s.statics.push_back({make_quad(Vec3(-200, g, -1.0), Vec3(200, g, -1.0), Vec3(200, g, start_z),
                                 Vec3(-200, g, start_z)),
                       StencilClass::Ground});
  const double y_far = g - rise * (far_z - start_z);
  s.statics.push_back({make_quad(Vec3(-200, g, start_z), Vec3(200, g, start_z),
                                 Vec3(200, y_far, far_z), Vec3(-200, y_far, far_z)),
                       StencilClass::Ground});
  const double y_car = g - rise * (car_z - start_z);
  s.entities.push_back(make_car(1, Vec3(3.0, y_car, car_z), -kPi / 2, "ingot", 0.0, slope));
  return s;
}

Scene make_random_scene(std::uint64_t seed, const RandomSceneOptions& options) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto count = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  Scene s;
  s.name = "random";
  s.statics.push_back(flat_ground());
  const double g = kSensorHeight;

  if (options.buildings) {
    for (double side : {-1.0, 1.0}) {
      double z = uniform(-5.0, 5.0);
      while (z < 120.0) {
        const double length = uniform(10.0, 30.0);
        const double depth = uniform(8.0, 16.0);
        const double inner = uniform(14.0, 17.0);
        const double height = uniform(6.0, 20.0);
        const double x0 = side > 0 ? inner : -inner - depth;
        s.statics.push_back({Box{Vec3(x0, g - height, z), Vec3(x0 + depth, g, z + length)},
                             StencilClass::Building});
        z += length + uniform(3.0, 12.0);
      }
    }
  }

  struct Footprint {
    double x, z, r;
  };
  std::vector<Footprint> placed;
  auto fits = [&](double x, double z, double r) {
    if (std::hypot(x, z) < r + 2.0) return false;
    for (const auto& f : placed) {
      if (std::hypot(f.x - x, f.z - z) < f.r + r + 0.5) return false;
    }
    return true;
  };

  EntityId next_id = 1;
  auto try_place = [&](auto&& sample, double radius, auto&& build) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      const auto [x, z] = sample();
      if (!fits(x, z, radius)) continue;
      placed.push_back({x, z, radius});
      s.entities.push_back(build(next_id++, x, z));
      return;
    }
  };
  // Separate statements keep the draw order fixed.
  auto heading = [&] {
    const double base = uniform(0.0, 1.0) < 0.5 ? -kPi / 2 : kPi / 2;
    return base + uniform(-0.1, 0.1);
  };

  const std::vector<std::string> car_models = {"ingot", "sedan_a", "hatch_b", "coupe_c", "suv_d"};
  const std::vector<double> lanes = {-5.25, -1.75, 1.75, 5.25};
  const int cars = count(options.min_cars, options.max_cars);
  for (int i = 0; i < cars; ++i) {
    const bool parked = uniform(0.0, 1.0) < 0.3;
    try_place(
        [&] {
          double x = 0.0;
          if (parked) {
            x = uniform(0.0, 1.0) < 0.5 ? -8.5 : 8.5;
            x += uniform(-0.2, 0.2);
          } else {
            x = pick(rng, lanes);
            x += uniform(-0.3, 0.3);
          }
          const double z = uniform(6.0, 80.0);
          return std::pair{x, z};
        },
        2.5, [&](EntityId id, double x, double z) {
          const double yaw = heading();
          std::string model = pick(rng, car_models);
          const double speed = parked ? 0.0 : uniform(2.0, 14.0);
          return make_car(id, Vec3(x, g, z), yaw, std::move(model), speed);
        });
  }

  const int large = count(0, options.max_large_vehicles);
  for (int i = 0; i < large; ++i) {
    const double roll_dice = uniform(0.0, 1.0);
    const ObjectClass cls = roll_dice < 0.5   ? ObjectClass::Truck
                            : roll_dice < 0.8 ? ObjectClass::Bus
                                              : ObjectClass::Trailer;
    const std::string model = cls == ObjectClass::Truck ? "box_truck"
                              : cls == ObjectClass::Bus ? "city_bus"
                                                        : "freight_trailer";
    try_place(
        [&] {
          const double x = pick(rng, lanes);
          const double z = uniform(20.0, 90.0);
          return std::pair{x, z};
        },
        5.8, [&](EntityId id, double x, double z) {
          const double yaw = heading();
          const double speed = uniform(0.0, 10.0);
          return make_large_vehicle(id, cls, Vec3(x, g, z), yaw, model, speed);
        });
  }

  const std::vector<std::string> ped_models = {"walker_a", "walker_b", "walker_c"};
  const int peds = count(options.min_pedestrians, options.max_pedestrians);
  for (int i = 0; i < peds; ++i) {
    try_place(
        [&] {
          const double side = uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
          const double x = side * uniform(7.5, 12.5);
          const double z = uniform(4.0, 60.0);
          return std::pair{x, z};
        },
        0.4, [&](EntityId id, double x, double z) {
          const double yaw = uniform(-kPi, kPi);
          std::string model = pick(rng, ped_models);
          const double speed = uniform(0.0, 2.0);
          return make_pedestrian(id, Vec3(x, g, z), yaw, std::move(model), speed);
        });
  }

  const int cyclists = count(0, options.max_cyclists);
  for (int i = 0; i < cyclists; ++i) {
    try_place(
        [&] {
          const double side = uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
          const double x = side * uniform(6.6, 7.2);
          const double z = uniform(8.0, 50.0);
          return std::pair{x, z};
        },
        1.0, [&](EntityId id, double x, double z) {
          const double yaw = heading();
          const double speed = uniform(2.0, 7.0);
          return make_cyclist(id, Vec3(x, g, z), yaw, "road_bike", speed);
        });
  }
  return s;
}

std::vector<std::string> builtin_scene_names() {
  return {"wall", "two-plane-step", "sphere", "street-basic", "slope", "random"};
}

Scene make_builtin_scene(std::string_view name, const SceneParams& params, std::uint64_t seed) {
  std::set<std::string> used;
  Scene scene;
  if (name == "wall") {
    scene = make_wall_scene(param(params, used, "z", 20.0));
  } else if (name == "two-plane-step") {
    scene = make_two_plane_step_scene(param(params, used, "near_z", 20.0),
                                      param(params, used, "ratio", 1.2));
  } else if (name == "sphere") {
    scene = make_sphere_scene(param(params, used, "radius", 2.0),
                              param(params, used, "distance", 20.0),
                              param(params, used, "wall_z", 30.0));
  } else if (name == "street-basic") {
    scene = make_street_basic_scene();
  } else if (name == "slope") {
    scene = make_slope_scene(param(params, used, "slope_deg", 10.0),
                             param(params, used, "start_z", 6.0),
                             param(params, used, "car_z", 13.0));
  } else if (name == "random") {
    RandomSceneOptions o;
    o.min_cars = static_cast<int>(param(params, used, "min_cars", o.min_cars));
    o.max_cars = static_cast<int>(param(params, used, "max_cars", o.max_cars));
    o.min_pedestrians = static_cast<int>(param(params, used, "min_pedestrians", o.min_pedestrians));
    o.max_pedestrians = static_cast<int>(param(params, used, "max_pedestrians", o.max_pedestrians));
    o.max_cyclists = static_cast<int>(param(params, used, "max_cyclists", o.max_cyclists));
    o.max_large_vehicles =
        static_cast<int>(param(params, used, "max_large_vehicles", o.max_large_vehicles));
    o.buildings = param(params, used, "buildings", 1.0) != 0.0;
    if (o.min_cars > o.max_cars || o.min_pedestrians > o.max_pedestrians || o.min_cars < 0 ||
        o.min_pedestrians < 0 || o.max_cyclists < 0 || o.max_large_vehicles < 0) {
      throw InvalidArgument("random: inconsistent entity count bounds");
    }
    scene = make_random_scene(seed, o);
  } else {
    throw InvalidArgument("unknown scene '" + std::string(name) + "'");
  }
  for (const auto& [key, value] : params) {
    if (!used.count(key)) {
      throw InvalidArgument("scene '" + std::string(name) + "' has no parameter '" + key + "'");
    }
  }
  return scene;
}

}  // namespace lidarsynth
