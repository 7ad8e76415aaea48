"""Smoke test for the Python extension.

Build and run from the repository root:

    cargo build -p semialg-py --features extension-module --release
    mkdir -p build && cp target/release/libsemialg_py.so build/semialg_py.so
    PYTHONPATH=build python3 python/smoke_test.py
"""

import json
import math
import xml.etree.ElementTree as ET

import semialg_py as sa

SCENE = json.dumps({
    "halfplanes": [{"coeffs": [0, 0, 1]}],
    "window": {"xmin": -2, "xmax": 2, "ymin": -2, "ymax": 2},
    "seed": 1,
})


def main():
    assert sa.real_roots([-1, 0, 1], -2, 2) == [-1.0, 1.0]
    exact = math.sqrt(5) + math.asinh(2) / 2
    assert abs(sa.arc_length([0, 0, 1], -1, 1) - exact) < 1e-10

    complex_ = json.loads(sa.decompose(SCENE))
    dims = {c["dim"] for c in complex_["cells"]}
    assert dims == {0, 1, 2}, dims

    assert json.loads(sa.classify(SCENE))["tag"] == "type_ii_regions"

    curve, length = sa.geodesic(SCENE, (-1.0, 0.5), (1.0, 0.5))
    assert abs(length - 2.25676) < 1e-4, length
    kinds = [p["kind"] for p in json.loads(curve)["pieces"]]
    assert kinds == ["segment", "arc", "segment"], kinds

    ok, report = sa.verify(SCENE, grid=128)
    assert ok, report

    svg = sa.render(SCENE, (-1.0, 0.5), (1.0, 0.5))
    root = ET.fromstring(svg.encode())
    assert root.tag.endswith("svg")

    try:
        sa.decompose("{}")
    except ValueError as e:
        assert "window" in str(e)
    else:
        raise AssertionError("missing window accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
