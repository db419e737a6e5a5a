"""Smoke tests for the Python bindings."""

import math

import pytest

import homnet


@pytest.fixture(scope="module")
def model():
    spec = homnet.SaddleSpectrum()
    tspec = homnet.TransitionSpec()
    return spec, tspec


def test_local_map_closed_form(model):
    spec, _ = model
    cap = homnet.local_map(homnet.WallPoint(0.0, 0.01), spec)
    assert cap.r == pytest.approx(1e-4, rel=1e-12)
    assert cap.phi == pytest.approx(math.log(100.0), rel=1e-12)
    assert cap.cap == homnet.Cap.top
    assert homnet.time_of_flight(homnet.WallPoint(0.0, math.exp(-3.0)), spec) == pytest.approx(3.0)


def test_stable_manifold_raises(model):
    spec, _ = model
    with pytest.raises(RuntimeError):
        homnet.local_map(homnet.WallPoint(0.0, 0.0), spec)


def test_crossings_match_closed_form(model):
    spec, tspec = model
    crossings = homnet.find_crossings(homnet.Segment.default_seed(), 4, spec, tspec)
    for k, c in enumerate(crossings, start=1):
        assert c.s == pytest.approx(math.exp(-k * math.pi), rel=1e-9)


def test_realize_path_witness(model):
    spec, tspec = model
    real = homnet.realize_path(
        "1211", homnet.Segment.default_seed(), homnet.RealizeMode.nested, 0, spec, tspec
    )
    assert real.check.word() == "1211"
    assert real.interval.prefix == "1211"
    widths = list(real.widths)
    assert all(b < a for a, b in zip(widths, widths[1:]))


def test_return_map_equivariance(model):
    spec, tspec = model
    w = homnet.WallPoint(1.1, 0.2)
    a = homnet.return_map(homnet.apply_symmetry(w), spec, tspec)
    b = homnet.return_map(w, spec, tspec)
    bm = homnet.apply_symmetry(b.point)
    assert a.point.x == pytest.approx(bm.x, abs=1e-12)
    assert a.point.y == pytest.approx(bm.y, abs=1e-12)
    assert a.symbol != b.symbol


def test_stability_quick(model):
    spec, tspec = model
    rep = homnet.stability_sample(300, 1e-6, 0.5, 1234, spec, tspec)
    assert rep.attracted == rep.samples
    assert rep.escaped == 0
    assert rep.max_steps <= 7


def test_contrast_requires_flag():
    with pytest.raises(ValueError):
        homnet.SaddleSpectrum(C=1.0, E=2.0)
    spec = homnet.SaddleSpectrum(C=1.0, E=2.0, contrast_ok=True)
    assert spec.delta() == pytest.approx(0.5)
