#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "relaxplan/scene_graph.hpp"

using namespace relaxplan;

namespace {

std::string tiny_scene_json() {
  return R"({
    "scene_id": "tiny",
    "rooms": [
      {"id": "kitchen", "label": "kitchen"},
      {"id": "hall", "label": "hallway"}
    ],
    "objects": [
      {"id": "mop_1", "label": "mop", "description": "a wet mop",
       "room_id": "kitchen", "position": [1.2, 0.3, 0.0]},
      {"id": "bin_1", "label": "bin", "description": "a plastic bin", "room_id": "hall"},
      {"id": "sponge_1", "label": "sponge", "description": "a clean sponge",
       "room_id": "kitchen", "render_data": {"mesh": "sponge.obj"}}
    ],
    "edges": [
      {"parent": "kitchen", "child": "mop_1", "relation": "in-room"},
      {"parent": "hall", "child": "bin_1", "relation": "in-room"}
    ]
  })";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_scene reads a structurally valid file") {
  auto scene = parse_scene(tiny_scene_json());
  REQUIRE(scene.ok());
  CHECK(scene.value().rooms.size() == 2);
  CHECK(scene.value().objects.size() == 3);
  CHECK(scene.value().objects[0].position.has_value());
}

TEST_CASE("parse_scene rejects a dangling room reference") {
  std::string text = R"({"scene_id":"x","rooms":[{"id":"r1","label":"a"}],
    "objects":[{"id":"o1","label":"o","description":"","room_id":"r9"}]})";
  auto scene = parse_scene(text);
  REQUIRE(!scene.ok());
  CHECK(scene.code() == ErrCode::dangling_reference);
  CHECK(scene.error().message.find("r9") != std::string::npos);
}

TEST_CASE("parse_scene rejects duplicate ids with an offset") {
  std::string text = R"({"scene_id":"x","rooms":[{"id":"r1","label":"a"}],
    "objects":[
      {"id":"mop_1","label":"m","description":"","room_id":"r1"},
      {"id":"mop_1","label":"m","description":"","room_id":"r1"}]})";
  auto scene = parse_scene(text);
  REQUIRE(!scene.ok());
  CHECK(scene.code() == ErrCode::malformed_scene);
  CHECK(scene.error().message == "duplicate id");
  CHECK(scene.error().offset > 0);
}

TEST_CASE("parse_scene rejects malformed JSON with a byte offset") {
  auto scene = parse_scene("{\"scene_id\": ");
  REQUIRE(!scene.ok());
  CHECK(scene.code() == ErrCode::malformed_scene);
  CHECK(scene.error().offset >= 0);
}

TEST_CASE("parse_scene rejects unknown relation tags") {
  std::string text = R"({"scene_id":"x","rooms":[{"id":"r1","label":"a"}],
    "objects":[{"id":"o1","label":"o","description":"","room_id":"r1"}],
    "edges":[{"parent":"r1","child":"o1","relation":"floats-above"}]})";
  auto scene = parse_scene(text);
  REQUIRE(!scene.ok());
  CHECK(scene.error().message.find("floats-above") != std::string::npos);
}

TEST_CASE("distill keeps ids, rooms, and descriptions and drops the rest") {
  auto scene = parse_scene(tiny_scene_json());
  REQUIRE(scene.ok());
  DistilledScene d = distill(scene.value());
  REQUIRE(d.entries.size() == 3);
  CHECK(d.entries[0].object_id == "bin_1");  // sorted by id
  CHECK(d.entries[1].object_id == "mop_1");
  CHECK(d.entries[1].room_id == "kitchen");
  CHECK(d.entries[1].description == "a wet mop");
  CHECK(serialize_distilled(d).find("position") == std::string::npos);
  CHECK(serialize_distilled(d).find("render_data") == std::string::npos);
}

TEST_CASE("distill on an empty-object scene keeps rooms") {
  std::string text = R"({"scene_id":"x","rooms":[{"id":"r1","label":"a"}],"objects":[]})";
  auto scene = parse_scene(text);
  REQUIRE(scene.ok());
  DistilledScene d = distill(scene.value());
  CHECK(d.entries.empty());
  CHECK(d.room_ids == std::vector<std::string>{"r1"});
}

TEST_CASE("distill is idempotent and never invents entries") {
  auto scene = parse_scene(read_file(std::string(RELAXPLAN_DATA_DIR) +
                                     "/mini/scenes/maplewood.json"));
  REQUIRE(scene.ok());
  DistilledScene once = distill(scene.value());
  CHECK(once.entries.size() == scene.value().objects.size());
  std::set<std::string> source_ids;
  for (const auto& o : scene.value().objects) source_ids.insert(o.id);
  std::set<std::string> entry_ids;
  for (const auto& e : once.entries) entry_ids.insert(e.object_id);
  CHECK(source_ids == entry_ids);  // bijective projection

  // distilling the same scene again yields an identical value
  CHECK(distill(scene.value()) == once);
}

TEST_CASE("distilled form of a full scene is smaller than its source") {
  std::string source = read_file(std::string(RELAXPLAN_DATA_DIR) + "/mini/scenes/maplewood.json");
  auto scene = parse_scene(source);
  REQUIRE(scene.ok());
  REQUIRE(scene.value().objects.size() >= 40);
  CHECK(serialize_distilled(distill(scene.value())).size() < source.size());
}

TEST_CASE("scatter_items is deterministic and respects forced placement") {
  auto scene = parse_scene(tiny_scene_json());
  REQUIRE(scene.ok());

  SECTION("single room forces placement") {
    std::string text = R"({"scene_id":"x","rooms":[{"id":"only","label":"o"}],"objects":[]})";
    auto one_room = parse_scene(text);
    REQUIRE(one_room.ok());
    std::vector<ObjectNode> items(3);
    items[0].id = "a_1";
    items[1].id = "b_1";
    items[2].id = "c_1";
    auto placed = scatter_items(one_room.value(), items, 5);
    REQUIRE(placed.ok());
    for (const auto& o : placed.value().objects) CHECK(o.room_id == "only");
  }

  SECTION("same seed, same outcome") {
    std::vector<ObjectNode> items(5);
    for (int i = 0; i < 5; ++i) items[i].id = "item_" + std::to_string(i);
    auto a = scatter_items(scene.value(), items, 42);
    auto b = scatter_items(scene.value(), items, 42);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.value().objects == b.value().objects);
    CHECK(a.value().edges == b.value().edges);
  }

  SECTION("id collision is rejected") {
    std::vector<ObjectNode> items(1);
    items[0].id = "mop_1";
    auto placed = scatter_items(scene.value(), items, 1);
    REQUIRE(!placed.ok());
    CHECK(placed.code() == ErrCode::id_collision);
  }
}

TEST_CASE("scatter distribution is near uniform across seeds") {
  // 100 seeds x 100 items over 4 rooms; chi-square with 3 dof
  std::string text = R"({"scene_id":"x","rooms":[
    {"id":"r1","label":""},{"id":"r2","label":""},{"id":"r3","label":""},{"id":"r4","label":""}],
    "objects":[]})";
  auto scene = parse_scene(text);
  REQUIRE(scene.ok());
  std::vector<ObjectNode> items(100);
  for (int i = 0; i < 100; ++i) items[i].id = "it_" + std::to_string(i);
  std::map<std::string, long> counts;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    auto placed = scatter_items(scene.value(), items, seed);
    REQUIRE(placed.ok());
    for (const auto& o : placed.value().objects) counts[o.room_id]++;
  }
  const double total = 100.0 * 100.0;
  const double expected = total / 4.0;
  double chi2 = 0.0;
  for (const auto& [room, n] : counts) {
    double d = n - expected;
    chi2 += d * d / expected;
    // 3 sigma of a binomial(total, 1/4)
    double sigma = std::sqrt(total * 0.25 * 0.75);
    CHECK(std::abs(d) <= 3.0 * sigma);
  }
  CHECK(chi2 < 16.27);  // critical value, df=3, alpha=0.001
}

TEST_CASE("lookup_object applies the normalization rule") {
  auto scene = parse_scene(tiny_scene_json());
  REQUIRE(scene.ok());
  DistilledScene d = distill(scene.value());

  auto hit = lookup_object(d, "Mop_1");
  REQUIRE(hit.has_value());
  CHECK(hit->object_id == "mop_1");

  CHECK(!lookup_object(d, "vacuum_9").has_value());

  // whitespace/hyphen normalization and round-trip over every entry
  std::string text = R"({"scene_id":"x","rooms":[{"id":"r1","label":"a"}],
    "objects":[{"id":"dining_table","label":"table","description":"","room_id":"r1"}]})";
  auto scene2 = parse_scene(text);
  REQUIRE(scene2.ok());
  auto d2 = distill(scene2.value());
  auto table = lookup_object(d2, "dining table");
  REQUIRE(table.has_value());
  CHECK(table->object_id == "dining_table");
  for (const auto& e : d.entries) {
    auto back = lookup_object(d, e.object_id);
    REQUIRE(back.has_value());
    CHECK(*back == e);
  }
}

TEST_CASE("distillation truncates descriptions to 256 characters") {
  std::string long_desc(400, 'x');
  std::string text = R"({"scene_id":"x","rooms":[{"id":"r1","label":"a"}],
    "objects":[{"id":"o1","label":"o","description":")" + long_desc +
                     R"(","room_id":"r1"}]})";
  auto scene = parse_scene(text);
  REQUIRE(scene.ok());
  auto d = distill(scene.value());
  CHECK(d.entries[0].description.size() == 256);
}
