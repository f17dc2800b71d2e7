#!/usr/bin/env python3
"""Regenerates the per-task ground-truth problem/plan files by running
the pipeline with the scripted backend (scatter seed 0). Run from the
repo root after building:
    python3 data/gen_ground_truth.py [build/tools/relaxplan]
"""
import json
import os
import subprocess
import sys
import tempfile

CLI = sys.argv[1] if len(sys.argv) > 1 else "build/tools/relaxplan"
ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "mini")
SEED = 0


def mix_seed(seed, key):
    h = 1469598103934665603 ^ ((seed * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF)
    for c in key.encode():
        h ^= c
        h = (h * 1099511628211) & 0xFFFFFFFFFFFFFFFF
    return h


def main():
    families = sorted(
        d for d in os.listdir(ROOT) if os.path.isdir(os.path.join(ROOT, d)) and d != "scenes")
    for family in families:
        fam_dir = os.path.join(ROOT, family)
        for task_id in sorted(os.listdir(fam_dir)):
            task_dir = os.path.join(fam_dir, task_id)
            meta_path = os.path.join(task_dir, "task.meta")
            if not os.path.isfile(meta_path):
                continue
            meta = json.load(open(meta_path))
            scene = os.path.join(ROOT, "scenes", meta["scene"] + ".json")
            with tempfile.TemporaryDirectory() as tmp:
                solve_scene = scene
                if meta.get("items_to_scatter"):
                    items = os.path.join(tmp, "items.json")
                    json.dump(meta["items_to_scatter"], open(items, "w"))
                    solve_scene = os.path.join(tmp, "scattered.json")
                    subprocess.run(
                        [CLI, "scatter", "--scene", scene, "--items", items, "--seed",
                         str(mix_seed(SEED, task_id)), "-o", solve_scene],
                        check=True)
                report = os.path.join(tmp, "report.json")
                proc = subprocess.run(
                    [CLI, "solve", "--goal", meta["goal_text"], "--scene", solve_scene,
                     "--desc-file", os.path.join(fam_dir, "description.txt"),
                     "--backend", "scripted", "--rules", os.path.join(fam_dir, "rules.json"),
                     "--report", report],
                    capture_output=True, text=True)
                if proc.returncode != 0:
                    print(f"{task_id}: solve failed\n{proc.stderr}", file=sys.stderr)
                    sys.exit(1)
                doc = json.load(open(report))
                final = sorted(k for k in doc["artifacts"] if k.startswith("problem"))[-1]
                open(os.path.join(task_dir, "problem.pddl"), "w").write(doc["artifacts"][final])
                open(os.path.join(task_dir, "plan.plan"), "w").write(
                    "\n".join(doc["plan"]) + "\n")
                print(f"{task_id}: {doc['outcome']} plan_len={len(doc['plan'])} "
                      f"relaxations={doc['trace']['total_relaxations']}")


if __name__ == "__main__":
    main()
