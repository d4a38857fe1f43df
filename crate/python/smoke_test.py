#!/usr/bin/env python3
"""Smoke test for the profcheck_py extension module.

Builds the cdylib with cargo if needed, loads it as a Python module and
exercises the main entry points against the builtin zoo.
"""

import json
import pathlib
import shutil
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def ensure_module() -> pathlib.Path:
    lib = ROOT / "target" / "release" / "libprofcheck_py.so"
    if not lib.exists():
        subprocess.run(
            ["cargo", "build", "--release", "-p", "profcheck-py"],
            cwd=ROOT,
            check=True,
        )
    target = ROOT / "python" / "profcheck_py.so"
    if not target.exists() or lib.stat().st_mtime > target.stat().st_mtime:
        shutil.copy2(lib, target)
    return target


def main() -> None:
    ensure_module()
    sys.path.insert(0, str(ROOT / "python"))
    import profcheck_py as pc

    names = dict(pc.list_presentations())
    assert "T" in names and "F_star" in names and len(names) >= 13, names
    assert "Zmod(2)" in pc.list_models()

    # Theorem 2 instance: the traced presentation holds on Z/2
    report = json.loads(pc.check("builtin:Zmod(2)", "T"))
    assert report["passed"], report
    labels = {e["label"] for e in report["check"]["equations"]}
    assert "Def8.vanishing_unit" in labels and "Def2.pentagon" in labels

    # the Boolean chain is *-autonomous but carries no trace
    try:
        pc.check("builtin:bool_chain", "T")
        raise AssertionError("expected a missing-structure error")
    except ValueError as e:
        assert "trace" in str(e)

    report = json.loads(pc.check("builtin:bool_chain", "F_star"))
    assert report["passed"], report

    # derivations
    assert json.loads(pc.derive("builtin:Zmod(3)", "traces"))["count"] == 1
    lin = json.loads(pc.derive("builtin:lukasiewicz3", "lindist"))
    assert not lin["right_invertible"] and "δ_R" in lin["right_witness"]
    rot = json.loads(pc.derive("builtin:Zmod(2)", "rotate"))
    assert rot["round_trip_exact"] and rot["left_axioms_pass"]
    p4 = json.loads(pc.derive("builtin:Zmod(2)", "prop4"))
    assert p4["conditions_hold"] and p4["distributors_invert"]

    # Karoubi envelope of the idempotent monoid {1, e} has two objects
    cat = {
        "name": "M1e",
        "objects": ["*"],
        "morphisms": [
            {"id": "1", "src": "*", "tgt": "*"},
            {"id": "e", "src": "*", "tgt": "*"},
        ],
        "identities": {"*": "1"},
        "composition": [["1", "1", "1"], ["1", "e", "e"], ["e", "1", "e"], ["e", "e", "e"]],
    }
    kar = json.loads(pc.karoubi(json.dumps(cat)))
    assert kar["envelope_objects"] == 2 and not kar["input_cauchy_complete"]

    print("profcheck_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
