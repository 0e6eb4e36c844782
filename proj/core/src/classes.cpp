#include "lidarsynth/classes.hpp"

namespace lidarsynth {

namespace {

constexpr std::array<std::string_view, 12> kObjectNames = {
    "Car",       "Pedestrian", "Cyclist", "Truck",    "Person_sitting", "Motorbike",
    "Trailer",   "Bus",        "Railed",  "Airplane", "Boat",           "Animal",
};

constexpr std::array<std::string_view, 5> kStencilNames = {
    "sky", "ground", "building", "wall", "vegetation",
};

}  // namespace

std::string_view to_string(ObjectClass cls) { return kObjectNames[static_cast<int>(cls)]; }

std::optional<ObjectClass> parse_object_class(std::string_view name) {
  for (std::size_t i = 0; i < kObjectNames.size(); ++i) {
    if (kObjectNames[i] == name) return static_cast<ObjectClass>(i);
  }
  return std::nullopt;
}

std::string_view to_string(StencilClass cls) { return kStencilNames[static_cast<int>(cls)]; }

std::optional<StencilClass> parse_stencil_class(std::string_view name) {
  for (std::size_t i = 0; i < kStencilNames.size(); ++i) {
    if (kStencilNames[i] == name) return static_cast<StencilClass>(i);
  }
  return std::nullopt;
}

std::optional<ObjectClass> object_class_of_stencil(std::uint32_t code) {
  if (code < kStencilBase + kObjectStencilOffset) return std::nullopt;
  const std::uint32_t index = code - kStencilBase - kObjectStencilOffset;
  if (index >= kAllObjectClasses.size()) return std::nullopt;
  return kAllObjectClasses[index];
}

}  // namespace lidarsynth
