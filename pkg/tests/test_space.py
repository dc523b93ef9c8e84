import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pho.learners import default_space
from pho.space import (
    SearchSpace,
    SpaceError,
    SpaceFileError,
    dump_space,
    enumerate_grid,
    load_space,
    parse_space,
    sample_without_replacement,
    validate_config,
)


def test_enumerate_small_grid(small_space):
    grid = enumerate_grid(small_space)
    assert len(grid) == 6
    assert grid[0].as_dict() == {"a": 1, "b": 0.1} and grid[0].index == 0
    assert grid[-1].as_dict() == {"a": 2, "b": 0.3} and grid[-1].index == 5
    assert [c.index for c in grid] == list(range(6))


def test_single_value_axis():
    grid = enumerate_grid(SearchSpace.from_dict({"x": [7]}))
    assert len(grid) == 1
    assert grid[0].as_dict() == {"x": 7} and grid[0].index == 0


def test_default_space_has_540_points():
    space = default_space()
    assert len(space.axes) == 5
    assert space.size == 540 == len(enumerate_grid(space))


def test_default_space_matches_shipped_config(tmp_path):
    from conftest import ROOT

    assert load_space(ROOT / "configs" / "boosted_stumps_540.json") == default_space()


def test_sample_exhaustive_is_permutation(small_space):
    drawn = sample_without_replacement(small_space, 6, seed=1)
    assert sorted(c.index for c in drawn) == list(range(6))


def test_sample_zero(small_space):
    assert sample_without_replacement(small_space, 0, seed=1) == []


def test_sample_regression_fixture(small_space):
    # recorded once from the seeded generator
    assert [c.index for c in sample_without_replacement(small_space, 3, 42)] == [5, 0, 3]


def test_sample_too_many(small_space):
    with pytest.raises(SpaceError):
        sample_without_replacement(small_space, 7, seed=0)


def test_validate_config(small_space):
    assert validate_config(small_space, {"a": 1, "b": 0.2}).index == 1
    with pytest.raises(SpaceError, match="missing axis"):
        validate_config(small_space, {"a": 1})
    with pytest.raises(SpaceError, match="not listed"):
        validate_config(small_space, {"a": 3, "b": 0.1})
    with pytest.raises(SpaceError, match="unknown axis"):
        validate_config(small_space, {"a": 1, "b": 0.1, "c": 0})


def test_axis_invariants():
    with pytest.raises(SpaceError):
        SearchSpace.from_dict({"a": []})
    with pytest.raises(SpaceError):
        SearchSpace.from_dict({"a": [1, 1]})
    with pytest.raises(SpaceError):
        SearchSpace(())


def test_parse_round_trip(tmp_path, small_space):
    path = tmp_path / "space.json"
    dump_space(small_space, path)
    assert load_space(path) == small_space


def test_parse_rejects_duplicates_with_line():
    text = '[\n  {"name": "a", "values": [1]},\n  {"name": "a", "values": [2]}\n]'
    with pytest.raises(SpaceFileError) as err:
        parse_space(text)
    assert err.value.line == 3
    assert "line 3" in str(err.value)


def test_parse_rejects_empty_values_with_line():
    text = '[\n  {"name": "a", "values": [1]},\n\n  {"name": "b", "values": []}\n]'
    with pytest.raises(SpaceFileError) as err:
        parse_space(text)
    assert err.value.line == 4


def test_parse_rejects_duplicate_values_and_bad_json():
    with pytest.raises(SpaceFileError) as err:
        parse_space('[{"name": "a",\n "values": [1, 1]}]')
    assert err.value.line == 1
    with pytest.raises(SpaceFileError) as err:
        parse_space('[\n{"name": "a", "values": [1]\n]')
    assert err.value.line is not None
    with pytest.raises(SpaceFileError):
        parse_space(json.dumps({"name": "a", "values": [1]}))


axes_strategy = st.dictionaries(
    st.text("abcdefgh", min_size=1, max_size=4),
    st.lists(st.integers(-50, 50), min_size=1, max_size=4, unique=True),
    min_size=1,
    max_size=4,
)


@settings(max_examples=60, deadline=None)
@given(axes_strategy)
def test_grid_size_and_index_round_trip(axes):
    space = SearchSpace.from_dict(axes)
    grid = enumerate_grid(space)
    expected = 1
    for values in axes.values():
        expected *= len(values)
    assert len(grid) == expected == space.size
    for config in grid:
        assert validate_config(space, config.assignments).index == config.index
        assert space.config_at(config.index) == config


@settings(max_examples=60, deadline=None)
@given(axes_strategy, st.integers(0, 2**63 - 1), st.data())
def test_sampling_distinct_and_reproducible(axes, seed, data):
    space = SearchSpace.from_dict(axes)
    count = data.draw(st.integers(0, space.size))
    first = sample_without_replacement(space, count, seed)
    assert len({c.index for c in first}) == count
    assert first == sample_without_replacement(space, count, seed)
