import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pho.data import DataError, Dataset, load_csv, make_two_gaussians, split


def write(tmp_path, text, name="d.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_one_hot_categories(tmp_path):
    path = write(tmp_path, "color,size,y\nx,1.5,yes\ny,2,no\nx,3,yes\n")
    ds = load_csv(path, "y", "yes")
    assert ds.column_names == ("color=x", "color=y", "size")
    np.testing.assert_array_equal(ds.features[0], [1, 0, 1.5])
    np.testing.assert_array_equal(ds.features[1], [0, 1, 2])
    np.testing.assert_array_equal(ds.labels, [1, 0, 1])
    assert (ds.row_count, ds.column_count) == (3, 3)


def test_numeric_passthrough(tmp_path):
    path = write(tmp_path, "a,b,label\n1,2.5,1\n-3,4e2,0\n")
    ds = load_csv(path, "label", "1")
    np.testing.assert_array_equal(ds.features, [[1, 2.5], [-3, 400]])


def test_semicolon_and_quoting(tmp_path):
    path = write(tmp_path, 'age;job;"y"\n30;"admin.";"no"\n41;"blue-collar";"yes"\n')
    ds = load_csv(path, "y", "yes", delimiter=";")
    assert ds.column_names == ("age", "job=admin.", "job=blue-collar")
    np.testing.assert_array_equal(ds.labels, [0, 1])


def test_load_errors(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "missing.csv", "y", "yes")
    with pytest.raises(DataError, match="empty"):
        load_csv(write(tmp_path, ""), "y", "yes")
    with pytest.raises(DataError, match="label column"):
        load_csv(write(tmp_path, "a,b\n1,2\n"), "y", "yes")
    with pytest.raises(DataError, match="non-numeric"):
        load_csv(write(tmp_path, "a,y\n1,yes\nfoo,no\n"), "y", "yes")


def test_one_hot_exactly_one_per_group(tmp_path):
    rng = np.random.default_rng(0)
    cats = rng.choice(list("pqrs"), size=40)
    lines = ["c,v,y"] + [f"{c},{i},{'yes' if i % 3 else 'no'}" for i, c in enumerate(cats)]
    ds = load_csv(write(tmp_path, "\n".join(lines) + "\n"), "y", "yes")
    group = [i for i, n in enumerate(ds.column_names) if n.startswith("c=")]
    np.testing.assert_array_equal(ds.features[:, group].sum(axis=1), 1)


def test_split_counts_and_determinism():
    ds = make_two_gaussians(rows=100, seed=1)
    a = split(ds, 0.67, seed=5)
    assert (a.train.row_count, a.test.row_count) == (67, 33)
    assert not set(a.train_rows) & set(a.test_rows)
    b = split(ds, 0.67, seed=5)
    np.testing.assert_array_equal(a.train_rows, b.train_rows)
    np.testing.assert_array_equal(a.train.features, b.train.features)


def test_split_rounding_small():
    ds = Dataset(np.arange(3.0)[:, None], [0, 1, 0], ("x",))
    pair = split(ds, 0.67, seed=0)
    assert (pair.train.row_count, pair.test.row_count) == (2, 1)


def test_split_fraction_errors():
    ds = make_two_gaussians(rows=10)
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DataError):
            split(ds, bad, seed=0)


def test_resplit_changes_membership():
    ds = make_two_gaussians(rows=100, seed=2)
    base = set(split(ds, 0.67, seed=0).train_rows)
    assert any(set(split(ds, 0.67, seed=s).train_rows) != base for s in range(1, 101))


def test_stratified_split_keeps_class_shares():
    ds = make_two_gaussians(rows=200, positive_rate=0.3, seed=4)
    pair = split(ds, 0.67, seed=1, stratified=True)
    pos = int(ds.labels.sum())
    assert pair.train.labels.sum() == round(0.67 * pos)
    assert sorted(np.r_[pair.train_rows, pair.test_rows]) == list(range(200))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 120), st.floats(0.01, 0.99), st.integers(0, 2**32))
def test_split_partitions_rows(rows, fraction, seed):
    ds = Dataset(np.arange(rows, dtype=float)[:, None], np.zeros(rows), ("x",))
    pair = split(ds, fraction, seed)
    assert pair.train.row_count == round(fraction * rows)
    together = np.sort(np.r_[pair.train_rows, pair.test_rows])
    np.testing.assert_array_equal(together, np.arange(rows))
    np.testing.assert_array_equal(pair.train.features[:, 0], pair.train_rows)
