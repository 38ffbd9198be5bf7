"""Smoke test for the hammerlip extension module.

Build and install first, e.g.

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/hammerlip-*.whl
    python python/smoke_test.py
"""

import json
import math

import hammerlip as hl


def main():
    band = hl.SlopeBand(0.5, 2.0)
    assert band.classify(1.0, 1.0) == "central"
    assert abs(band.limiting_shape(1.0, 1.0) - 2.0 / math.sqrt(3.0)) < 1e-12
    m11, m12, m21, m22 = band.phi()
    assert abs(m11 * m22 - m12 * m21 - 1.0) < 1e-12
    assert band.order_holds((0.0, 0.0), (1.0, 1.0))
    assert not band.order_holds((0.0, 0.0), (1.0, 3.0))

    try:
        hl.SlopeBand(2.0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("inverted band accepted")

    five = hl.PointCloud.from_points([(0.1, 0.2), (0.3, 0.5), (0.2, 0.9), (0.6, 0.7), (0.8, 0.1)])
    assert len(five) == 5
    length, path = five.longest_chain()
    assert length == 3
    length, path = five.longest_chain(band)
    assert path == [(0.1, 0.2), (0.3, 0.5), (0.6, 0.7)]

    par = hl.Parallelogram.from_corner(9.0, 1.0, 2.0)
    area, witness, direction, shift = par.max_rectangle()
    assert area == 15.125
    assert witness == (0.0, 5.5, 0.0, 2.75)
    assert shift == 1.75

    cloud = hl.PointCloud.sample_rect(50.0, 50.0, 1.0, seed=7)
    again = hl.PointCloud.sample_rect(50.0, 50.0, 1.0, seed=7)
    assert cloud.points() == again.points()
    assert hl.child_seed(1, 0) != hl.child_seed(1, 1)

    report = json.loads(hl.run_experiment("shape", 1.0, 1.0, band, [50.0, 100.0], 4, seed=3))
    assert report["name"] == "shape"
    assert len(report["rows"]) == 8

    assert hl.coupling_check(50, 60, 1) == (50, 0)
    retained, _, violations = hl.crossing_check(20, 1)
    assert (retained, violations) == (20, 0)
    print("smoke test passed")


if __name__ == "__main__":
    main()
