#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaxplan/error.hpp"
#include "relaxplan/text.hpp"

namespace relaxplan {

// 3D scene graphs arrive as JSON documents (schema in docs/scene_format.md).
// Distillation projects them down to the object-location entries the
// planning pipeline and the language backends consume.

struct RoomNode {
  std::string id;
  std::string label;

  bool operator==(const RoomNode&) const = default;
};

struct ObjectNode {
  std::string id;
  std::string label;
  std::string description;
  std::string room_id;
  std::map<std::string, std::string> attributes;
  std::optional<std::array<double, 3>> position;
  std::string render_data;  // opaque payload, never interpreted

  bool operator==(const ObjectNode&) const = default;
};

struct SceneEdge {
  std::string parent;
  std::string child;
  std::string relation;  // in-room | on | inside

  bool operator==(const SceneEdge&) const = default;
};

struct SceneGraph {
  std::string scene_id;
  std::vector<RoomNode> rooms;
  std::vector<ObjectNode> objects;
  std::vector<SceneEdge> edges;

  const RoomNode* find_room(const std::string& id) const {
    for (const auto& r : rooms)
      if (r.id == id) return &r;
    return nullptr;
  }
};

struct DistilledEntry {
  std::string object_id;
  std::string room_id;
  std::string description;

  bool operator==(const DistilledEntry&) const = default;
};

struct DistilledScene {
  std::string scene_id;
  std::vector<DistilledEntry> entries;  // sorted by object_id
  std::vector<std::string> room_ids;

  bool operator==(const DistilledScene&) const = default;

  bool has_room(const std::string& id) const {
    return std::find(room_ids.begin(), room_ids.end(), id) != room_ids.end();
  }
};

namespace scene_detail {

inline const std::set<std::string>& relation_tags() {
  static const std::set<std::string> tags = {"in-room", "on", "inside"};
  return tags;
}

inline long locate(const std::string& text, const std::string& needle) {
  size_t pos = text.find(needle);
  return pos == std::string::npos ? 0 : static_cast<long>(pos);
}

inline Error malformed(const std::string& text, const std::string& needle,
                       const std::string& reason) {
  Error e{ErrCode::malformed_scene, reason};
  e.offset = locate(text, needle);
  return e;
}

}  // namespace scene_detail

inline Result<SceneGraph> parse_scene(const std::string& bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& ex) {
    Error e{ErrCode::malformed_scene, ex.what()};
    e.offset = static_cast<long>(ex.byte);
    return e;
  }
  try {
    SceneGraph scene;
    scene.scene_id = doc.at("scene_id").get<std::string>();
    std::set<std::string> ids;
    for (const auto& r : doc.at("rooms")) {
      RoomNode room;
      room.id = r.at("id").get<std::string>();
      room.label = r.value("label", "");
      if (room.id.empty())
        return scene_detail::malformed(bytes, "\"rooms\"", "room with empty id");
      if (!ids.insert(room.id).second)
        return scene_detail::malformed(bytes, "\"" + room.id + "\"", "duplicate id");
      scene.rooms.push_back(std::move(room));
    }
    for (const auto& o : doc.at("objects")) {
      ObjectNode obj;
      obj.id = o.at("id").get<std::string>();
      obj.label = o.value("label", "");
      obj.description = o.value("description", "");
      obj.room_id = o.at("room_id").get<std::string>();
      if (o.contains("attributes"))
        for (const auto& [k, v] : o.at("attributes").items())
          obj.attributes[k] = v.get<std::string>();
      if (o.contains("position")) {
        auto p = o.at("position");
        if (!p.is_array() || p.size() != 3)
          return scene_detail::malformed(bytes, "\"position\"", "position must have 3 components");
        obj.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
      }
      if (o.contains("render_data")) obj.render_data = o.at("render_data").dump();
      if (!ids.insert(obj.id).second)
        return scene_detail::malformed(bytes, "\"" + obj.id + "\"", "duplicate id");
      if (!scene.find_room(obj.room_id))
        return Error{ErrCode::dangling_reference, "object '" + obj.id +
                         "' references unknown room '" + obj.room_id + "'"};
      scene.objects.push_back(std::move(obj));
    }
    if (doc.contains("edges")) {
      for (const auto& e : doc.at("edges")) {
        SceneEdge edge{e.at("parent").get<std::string>(), e.at("child").get<std::string>(),
                       e.at("relation").get<std::string>()};
        if (!scene_detail::relation_tags().count(edge.relation))
          return scene_detail::malformed(bytes, "\"" + edge.relation + "\"",
                                         "unknown relation tag '" + edge.relation + "'");
        for (const auto* endpoint : {&edge.parent, &edge.child})
          if (!ids.count(*endpoint))
            return Error{ErrCode::dangling_reference,
                         "edge references unknown id '" + *endpoint + "'"};
        scene.edges.push_back(std::move(edge));
      }
    }
    return scene;
  } catch (const nlohmann::json::exception& ex) {
    return scene_detail::malformed(bytes, "", ex.what());
  }
}

/// Keeps (object, room, description) only; spatial cues and render data
/// are dropped. Output ordering is fixed: entries sorted by object id.
inline DistilledScene distill(const SceneGraph& scene) {
  DistilledScene out;
  out.scene_id = scene.scene_id;
  for (const auto& r : scene.rooms) out.room_ids.push_back(r.id);
  std::sort(out.room_ids.begin(), out.room_ids.end());
  for (const auto& o : scene.objects) {
    std::string desc = o.description;
    if (desc.size() > 256) desc.resize(256);
    out.entries.push_back({o.id, o.room_id, desc});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const DistilledEntry& a, const DistilledEntry& b) {
              return a.object_id < b.object_id;
            });
  return out;
}

/// Places each item template into a uniformly random room. Deterministic
/// for a fixed seed; never mutates the input scene.
inline Result<SceneGraph> scatter_items(const SceneGraph& scene,
                                        const std::vector<ObjectNode>& items, uint64_t seed) {
  SceneGraph out = scene;
  std::set<std::string> ids;
  for (const auto& r : scene.rooms) ids.insert(r.id);
  for (const auto& o : scene.objects) ids.insert(o.id);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, scene.rooms.empty() ? 0 : scene.rooms.size() - 1);
  if (scene.rooms.empty())
    return Error{ErrCode::malformed_scene, "cannot scatter into a scene with no rooms"};
  for (const auto& tmpl : items) {
    if (!ids.insert(tmpl.id).second)
      return Error{ErrCode::id_collision, "id '" + tmpl.id + "' already present in scene"};
    ObjectNode placed = tmpl;
    placed.room_id = scene.rooms[pick(rng)].id;
    placed.position.reset();
    out.edges.push_back({placed.room_id, placed.id, "in-room"});
    out.objects.push_back(std::move(placed));
  }
  return out;
}

inline std::optional<DistilledEntry> lookup_object(const DistilledScene& scene,
                                                   const std::string& symbol) {
  std::string wanted = normalize_symbol(symbol);
  for (const auto& e : scene.entries)
    if (normalize_symbol(e.object_id) == wanted) return e;
  return std::nullopt;
}

inline std::string serialize_distilled(const DistilledScene& scene) {
  nlohmann::json doc;
  doc["scene_id"] = scene.scene_id;
  doc["room_ids"] = scene.room_ids;
  auto& entries = doc["entries"] = nlohmann::json::array();
  for (const auto& e : scene.entries)
    entries.push_back({{"object_id", e.object_id}, {"room_id", e.room_id},
                       {"description", e.description}});
  return doc.dump(2);
}

/// Compact line-per-object form used inside language-model prompts.
inline std::string distilled_to_text(const DistilledScene& scene) {
  std::string out = "rooms: " + join(scene.room_ids, ", ") + "\n";
  for (const auto& e : scene.entries)
    out += e.object_id + " | " + e.room_id + " | " + e.description + "\n";
  return out;
}

}  // namespace relaxplan
