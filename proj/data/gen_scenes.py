#!/usr/bin/env python3
"""Regenerates the bundled scene files. Run from the repo root:
    python3 data/gen_scenes.py
"""
import json
import os

ROOMS = [
    ("bathroom", "bathroom"),
    ("bedroom", "bedroom"),
    ("dining_room", "dining room"),
    ("kitchen", "kitchen"),
    ("laundry_room", "laundry room"),
    ("living_room", "living room"),
    ("storage_room", "storage room"),
    ("study", "study"),
]


def obj(oid, label, desc, room, pos=None, attrs=None):
    node = {"id": oid, "label": label, "description": desc, "room_id": room}
    if pos:
        node["position"] = pos
    if attrs:
        node["attributes"] = attrs
    return node


def scene(scene_id, objects):
    edges = [{"parent": o["room_id"], "child": o["id"], "relation": "in-room"} for o in objects]
    return {
        "scene_id": scene_id,
        "rooms": [{"id": rid, "label": lbl} for rid, lbl in ROOMS],
        "objects": objects,
        "edges": edges,
    }


MAPLEWOOD = [
    # dining
    obj("dining_table_1", "dining_table", "a long oak dining table", "dining_room", [4.1, 2.0, 0.0]),
    obj("plate_1", "plate", "a white ceramic plate", "kitchen", [0.8, 1.1, 0.9]),
    obj("plate_2", "plate", "a blue ceramic plate", "kitchen", [0.9, 1.1, 0.9]),
    obj("fork_1", "fork", "a steel fork", "kitchen", [0.82, 1.2, 0.9]),
    obj("fork_2", "fork", "a steel fork with a bent tine", "kitchen", [0.84, 1.2, 0.9]),
    obj("knife_1", "knife", "a table knife", "kitchen", [0.86, 1.2, 0.9]),
    obj("cup_1", "cup", "a porcelain cup", "kitchen", [0.6, 1.4, 0.9]),
    obj("mug_1", "mug", "a large coffee mug", "kitchen", [0.62, 1.4, 0.9]),
    obj("napkin_1", "napkin", "a folded linen napkin", "dining_room", [4.0, 2.2, 0.76]),
    obj("napkin_2", "napkin", "a paper napkin", "dining_room", [4.05, 2.2, 0.76]),
    # cleaning
    obj("mop_1", "mop", "a cotton mop with a wooden handle", "laundry_room", [1.0, 0.4, 0.0]),
    obj("sponge_1", "sponge", "a yellow kitchen sponge", "kitchen", [0.5, 0.9, 0.9]),
    obj("bin_1", "bin", "a pedal bin", "kitchen", [0.2, 0.2, 0.0]),
    # laundry
    obj("washing_machine_1", "washing_machine", "a front-loading washing machine",
        "laundry_room", [0.0, 1.0, 0.0], {"affordance": "openable"}),
    obj("detergent_1", "detergent", "a bottle of laundry detergent", "laundry_room", [0.3, 1.1, 0.8]),
    obj("soap_1", "soap", "a bar of laundry soap", "bathroom", [0.4, 0.6, 0.9]),
    obj("towel_1", "towel", "a damp bath towel", "bathroom", [0.8, 0.5, 0.9]),
    obj("shirt_1", "shirt", "a crumpled cotton shirt", "bedroom", [2.2, 1.5, 0.4]),
    # pc
    obj("monitor_1", "monitor", "a 24 inch office monitor", "study", [5.4, 1.2, 0.75]),
    obj("computer_case_2", "computer_case", "a dusty spare tower case", "storage_room", [3.1, 0.5, 0.0]),
    # office
    obj("box_1", "box", "a cardboard box of supplies", "study", [5.0, 0.4, 0.0]),
    obj("box_2", "box", "a plastic storage box", "living_room", [3.6, 2.8, 0.0]),
    obj("pen_1", "pen", "a ballpoint pen kept inside the box_1", "study", [5.0, 0.4, 0.1]),
    obj("stapler_1", "stapler", "a red stapler kept inside the box_2", "living_room", [3.6, 2.8, 0.1]),
    obj("folder_1", "folder", "a manila folder kept inside the box_2", "living_room", [3.6, 2.8, 0.12]),
    # furnishing clutter that pads the scene to house scale
    obj("sofa_1", "sofa", "a three-seat sofa", "living_room", [3.0, 2.0, 0.0]),
    obj("armchair_1", "armchair", "a worn armchair", "living_room", [2.4, 2.6, 0.0]),
    obj("tv_stand_1", "tv_stand", "a low tv stand", "living_room", [3.9, 1.0, 0.0]),
    obj("lamp_1", "lamp", "a floor lamp", "living_room", [3.1, 1.1, 0.0]),
    obj("lamp_2", "lamp", "a bedside lamp", "bedroom", [2.0, 1.0, 0.5]),
    obj("bed_1", "bed", "a queen-size bed", "bedroom", [1.5, 1.5, 0.0]),
    obj("wardrobe_1", "wardrobe", "a pine wardrobe", "bedroom", [0.5, 2.5, 0.0]),
    obj("bookshelf_1", "bookshelf", "a tall bookshelf", "study", [5.8, 0.2, 0.0]),
    obj("book_1", "book", "a hardcover novel", "study", [5.8, 0.25, 1.2]),
    obj("book_2", "book", "an atlas", "living_room", [3.9, 1.05, 0.4]),
    obj("desk_1", "desk", "a writing desk", "study", [5.4, 1.1, 0.0]),
    obj("chair_1", "chair", "a desk chair", "study", [5.3, 1.4, 0.0]),
    obj("chair_2", "chair", "a dining chair", "dining_room", [4.2, 1.8, 0.0]),
    obj("chair_3", "chair", "a dining chair", "dining_room", [4.2, 2.3, 0.0]),
    obj("plant_1", "plant", "a potted fern", "living_room", [2.8, 3.0, 0.0]),
    obj("plant_2", "plant", "a small cactus", "study", [5.5, 1.15, 0.76]),
    obj("toaster_1", "toaster", "a two-slice toaster", "kitchen", [0.4, 1.3, 0.9]),
    obj("kettle_1", "kettle", "an electric kettle", "kitchen", [0.45, 1.35, 0.9]),
    obj("mirror_1", "mirror", "a wall mirror", "bathroom", [0.1, 0.8, 1.4]),
    obj("rug_1", "rug", "a woollen rug", "living_room", [3.0, 2.2, 0.0]),
]

CRESTVIEW = [
    obj("dining_table_1", "dining_table", "a round glass dining table", "dining_room"),
    obj("plate_1", "plate", "a stoneware plate", "kitchen"),
    obj("plate_2", "plate", "a stoneware plate with a chip", "kitchen"),
    obj("knife_1", "knife", "a table knife", "kitchen"),
    obj("knife_2", "knife", "a serrated table knife", "kitchen"),
    obj("fork_1", "fork", "a salad fork", "kitchen"),
    obj("cup_1", "cup", "an espresso cup", "kitchen"),
    obj("napkin_1", "napkin", "a cotton napkin", "dining_room"),
    obj("sponge_1", "sponge", "a two-sided scrubbing sponge", "bathroom"),
    obj("bin_1", "bin", "a swing-top bin", "kitchen"),
    obj("washing_machine_1", "washing_machine", "a top-loading washing machine", "laundry_room"),
    obj("detergent_1", "detergent", "a box of washing powder", "laundry_room"),
    obj("box_1", "box", "a filing box", "study"),
    obj("box_2", "box", "a shoe box", "bedroom"),
    obj("pen_1", "pen", "a fountain pen kept inside the box_1", "study"),
    obj("notebook_1", "notebook", "a spiral notebook kept inside the box_1", "study"),
    obj("stapler_1", "stapler", "a black stapler kept inside the box_2", "bedroom"),
    obj("desk_1", "desk", "a corner desk", "study"),
    obj("chair_1", "chair", "an office chair", "study"),
    obj("sofa_1", "sofa", "a two-seat sofa", "living_room"),
    obj("lamp_1", "lamp", "a reading lamp", "living_room"),
    obj("plant_1", "plant", "a rubber plant", "living_room"),
]

LARKSPUR = [
    obj("dining_table_1", "dining_table", "a walnut dining table", "dining_room"),
    obj("plate_1", "plate", "a porcelain plate", "kitchen"),
    obj("plate_2", "plate", "a porcelain plate", "kitchen"),
    obj("fork_1", "fork", "a dessert fork", "kitchen"),
    obj("knife_1", "knife", "a butter knife", "kitchen"),
    obj("glass_1", "glass", "a tall water glass", "kitchen"),
    obj("washing_machine_1", "washing_machine", "a compact washing machine", "laundry_room"),
    obj("detergent_1", "detergent", "a bottle of gentle detergent", "laundry_room"),
    obj("soap_1", "soap", "a block of soap", "bathroom"),
    obj("towel_1", "towel", "a hand towel", "bathroom"),
    obj("box_1", "box", "a book box", "study"),
    obj("box_2", "box", "a moving box", "living_room"),
    obj("pen_1", "pen", "a gel pen kept inside the box_1", "study"),
    obj("folder_1", "folder", "a project folder kept inside the box_2", "living_room"),
    obj("mop_1", "mop", "a microfibre mop", "laundry_room"),
    obj("bin_1", "bin", "a mesh wastebasket", "study"),
    obj("bed_1", "bed", "a single bed", "bedroom"),
    obj("lamp_1", "lamp", "a desk lamp", "study"),
    obj("bookshelf_1", "bookshelf", "a short bookshelf", "living_room"),
    obj("plant_1", "plant", "a peace lily", "dining_room"),
]

BROOKSIDE = [
    obj("projector_1", "projector", "a ceiling projector on a stand", "living_room"),
    obj("mop_1", "mop", "a sponge mop", "laundry_room"),
    obj("sponge_1", "sponge", "a cellulose sponge", "kitchen"),
    obj("bin_1", "bin", "a recycling bin", "kitchen"),
    obj("washing_machine_1", "washing_machine", "an old but reliable washing machine", "laundry_room"),
    obj("detergent_1", "detergent", "a jug of liquid detergent", "laundry_room"),
    obj("soap_1", "soap", "a bar of mild soap", "bathroom"),
    obj("dining_table_1", "dining_table", "a small square dining table", "dining_room"),
    obj("plate_1", "plate", "a melamine plate", "kitchen"),
    obj("fork_1", "fork", "a fork", "kitchen"),
    obj("desk_1", "desk", "a standing desk", "study"),
    obj("chair_1", "chair", "a folding chair", "study"),
    obj("box_1", "box", "an archive box", "storage_room"),
    obj("pen_1", "pen", "a marker pen kept inside the box_1", "storage_room"),
    obj("sofa_1", "sofa", "a futon sofa", "living_room"),
    obj("lamp_1", "lamp", "an arc lamp", "living_room"),
    obj("towel_1", "towel", "a beach towel", "bathroom"),
    obj("plant_1", "plant", "a snake plant", "bedroom"),
]

FIG_HOUSE = [
    obj("cloth_1", "cloth", "a soft cleaning cloth", "laundry_room"),
    obj("bin_1", "bin", "a garden waste bin", "kitchen"),
    obj("dining_table_1", "dining_table", "a tiled dining table", "dining_room"),
    obj("lamp_1", "lamp", "a table lamp", "living_room"),
    obj("sofa_1", "sofa", "a velvet sofa", "living_room"),
    obj("bed_1", "bed", "a bunk bed", "bedroom"),
]


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    scenes = {
        os.path.join(here, "mini", "scenes", "maplewood.json"): scene("maplewood", MAPLEWOOD),
        os.path.join(here, "mini", "scenes", "crestview.json"): scene("crestview", CRESTVIEW),
        os.path.join(here, "mini", "scenes", "larkspur.json"): scene("larkspur", LARKSPUR),
        os.path.join(here, "mini", "scenes", "brookside.json"): scene("brookside", BROOKSIDE),
        os.path.join(here, "fig3", "scenes", "fig_house.json"): scene("fig_house", FIG_HOUSE),
    }
    for path, doc in scenes.items():
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")
        print(f"wrote {path} ({len(doc['objects'])} objects)")


if __name__ == "__main__":
    main()
