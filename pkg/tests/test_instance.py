"""Measures, loaders, and validation."""

import pytest

from kantor import (
    MassPoint,
    Measure,
    Metric,
    ParseError,
    Point,
    ProblemInstance,
    ValidationError,
    dump_points,
    load_pgm,
    load_points,
    validate,
)
from helpers import instance, measure


def test_load_points_basic(tmp_path):
    f = tmp_path / "a.pts"
    f.write_text("0 0 1\n3 4 2\n")
    m = load_points(f)
    assert len(m) == 2
    assert m.total_mass == 3


def test_load_points_merges_duplicates(tmp_path):
    f = tmp_path / "a.pts"
    f.write_text("0 0 1\n0 0 1\n")
    m = load_points(f)
    assert len(m) == 1
    assert m.points[0] == MassPoint(Point(0, 0), 2)


def test_load_points_nonpositive_mass(tmp_path):
    f = tmp_path / "a.pts"
    f.write_text("0 0 -1\n")
    with pytest.raises(ParseError, match="nonpositive mass at line 1"):
        load_points(f)


def test_load_points_comments_blanks_and_decimals(tmp_path):
    f = tmp_path / "a.pts"
    f.write_text("# header\n\n1 2 3  # trailing comment\n0.5 -1.25 2.5\n")
    m = load_points(f)
    assert len(m) == 2
    assert m.total_mass == 5.5
    assert not m.is_integral


def test_load_points_errors(tmp_path):
    f = tmp_path / "a.pts"
    f.write_text("1 2\n")
    with pytest.raises(ParseError, match="line 1"):
        load_points(f)
    f.write_text("1 2 x\n")
    with pytest.raises(ParseError, match="line 1"):
        load_points(f)
    f.write_text("# nothing\n")
    with pytest.raises(ParseError, match="empty"):
        load_points(f)


def test_points_round_trip_is_canonical(tmp_path):
    f = tmp_path / "a.pts"
    f.write_text("5 5 2\n0 1 1\n1 0 3\n")
    m = load_points(f)
    out = tmp_path / "b.pts"
    dump_points(m, out)
    again = load_points(out)
    assert again == m
    # canonical order: by x+y, ties by x
    assert [mp.position for mp in m.points] == [Point(0, 1), Point(1, 0), Point(5, 5)]


def test_load_pgm_single_pixel(tmp_path):
    f = tmp_path / "a.pgm"
    f.write_text("P2\n1 1\n255\n5\n")
    m = load_pgm(f)
    assert m.points == (MassPoint(Point(0, 0), 5),)


def test_load_pgm_skips_zero_pixels(tmp_path):
    f = tmp_path / "a.pgm"
    f.write_text("P2\n2 1\n255\n0 7\n")
    m = load_pgm(f)
    assert m.points == (MassPoint(Point(1, 0), 7),)


def test_load_pgm_row_flip(tmp_path):
    # two rows: file row 0 is the top, stored with y = height-1-row
    f = tmp_path / "a.pgm"
    f.write_text("P2\n1 2\n255\n3\n4\n")
    m = load_pgm(f)
    assert set(m.points) == {MassPoint(Point(0, 1), 3), MassPoint(Point(0, 0), 4)}


def test_load_pgm_comments(tmp_path):
    f = tmp_path / "a.pgm"
    f.write_text("P2 # plain\n# a comment line\n2 2\n9\n1 2\n3 4\n")
    m = load_pgm(f)
    assert m.total_mass == 10


def test_load_pgm_errors(tmp_path):
    f = tmp_path / "a.pgm"
    f.write_text("P5\n1 1\n255\n5\n")
    with pytest.raises(ParseError, match="magic"):
        load_pgm(f)
    f.write_text("P2\n2 2\n255\n1 2 3\n")
    with pytest.raises(ParseError, match="expected 4"):
        load_pgm(f)
    f.write_text("P2\n1 1\n255\n0\n")
    with pytest.raises(ParseError, match="empty"):
        load_pgm(f)


def test_measure_invariants():
    with pytest.raises(ValidationError):
        Measure([])
    with pytest.raises(ValidationError):
        Measure([MassPoint(Point(0, 0), 0)])
    with pytest.raises(ValidationError):
        Measure([MassPoint(Point(0, 0), 1), MassPoint(Point(0, 0), 2)])
    merged = Measure.merged([(Point(0, 0), 1), (Point(0, 0), 2)])
    assert merged.total_mass == 3


def test_validate_balanced_ok():
    inst = instance([((0, 0), 3)], [((1, 1), 3)], Metric.L1)
    assert validate(inst) == []


def test_validate_unbalanced():
    inst = instance([((0, 0), 3)], [((1, 1), 4)], Metric.L1)
    violations = validate(inst)
    assert len(violations) == 1
    assert "unbalanced" in violations[0]
    assert "3" in violations[0] and "4" in violations[0]


def test_validate_identical_measures_ok():
    m = measure([((0, 0), 1), ((2, 3), 2)])
    inst = ProblemInstance(m, m, Metric.EUCLID)
    assert validate(inst) == []


def test_integral_flag():
    assert instance([((0, 0), 1)], [((1, 1), 1)], Metric.L1).is_integral
    assert not instance([((0.5, 0), 1)], [((1, 1), 1)], Metric.L1).is_integral
    assert not instance([((0, 0), 1.5)], [((1, 1), 1.5)], Metric.L1).is_integral
