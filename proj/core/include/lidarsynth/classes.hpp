#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace lidarsynth {

using EntityId = std::uint32_t;

/// Annotated object classes (KITTI names plus the extra vehicle/other types).
enum class ObjectClass : std::uint8_t {
  Car,
  Pedestrian,
  Cyclist,
  Truck,
  PersonSitting,
  Motorbike,
  Trailer,
  Bus,
  Railed,
  Airplane,
  Boat,
  Animal,
};

inline constexpr std::array<ObjectClass, 12> kAllObjectClasses = {
    ObjectClass::Car,     ObjectClass::Pedestrian, ObjectClass::Cyclist,  ObjectClass::Truck,
    ObjectClass::PersonSitting, ObjectClass::Motorbike, ObjectClass::Trailer, ObjectClass::Bus,
    ObjectClass::Railed,  ObjectClass::Airplane,   ObjectClass::Boat,     ObjectClass::Animal,
};

/// KITTI spelling, e.g. "Person_sitting".
std::string_view to_string(ObjectClass cls);
std::optional<ObjectClass> parse_object_class(std::string_view name);

/// Background semantics for pixels and points that are not on an entity.
enum class StencilClass : std::uint8_t {
  Sky = 0,
  Ground = 1,
  Building = 2,
  Wall = 3,
  Vegetation = 4,
};

std::string_view to_string(StencilClass cls);
std::optional<StencilClass> parse_stencil_class(std::string_view name);

// Label code space shared by segmentation images and point sidecars.
// Entity IDs occupy [1, kMaxEntityId]; stencil codes live above kStencilBase.
// Background stencil codes are kStencilBase + StencilClass; object-class
// stencil codes (used before instances are separated) are
// kStencilBase + 0x100 + ObjectClass.
inline constexpr std::uint32_t kMaxEntityId = 0x00FFFFFFu;
inline constexpr std::uint32_t kStencilBase = 0xFF000000u;
inline constexpr std::uint32_t kObjectStencilOffset = 0x100u;

constexpr std::uint32_t stencil_code(StencilClass cls) {
  return kStencilBase + static_cast<std::uint32_t>(cls);
}
constexpr std::uint32_t stencil_code(ObjectClass cls) {
  return kStencilBase + kObjectStencilOffset + static_cast<std::uint32_t>(cls);
}
inline constexpr std::uint32_t kSkyCode = stencil_code(StencilClass::Sky);

constexpr bool is_entity_code(std::uint32_t code) { return code >= 1 && code <= kMaxEntityId; }
constexpr bool is_stencil_code(std::uint32_t code) { return code >= kStencilBase; }

/// Object class encoded by an object-class stencil code, if it is one.
std::optional<ObjectClass> object_class_of_stencil(std::uint32_t code);

}  // namespace lidarsynth
