import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oppermann import rtable
from oppermann.arith import InvalidArgument, deterministic_prime
from oppermann.oracle import primes_in_range


def test_generate_100_200():
    t = rtable.generate(100, 200)
    assert [g[0] for g in t.groups] == [101, 127, 157, 197]
    assert t.groups[0] == (101, 103, 107, 109, 113)
    # each class is the five smallest primes at or above its magnitude
    for mag, g in zip((100, 125, 156, 195), t.groups):
        assert list(g) == primes_in_range(mag - 1, mag + 200)[:5]


def test_generate_smallest():
    assert rtable.generate(2, 3).groups == ((2, 3, 5, 7, 11),)


def test_generate_million():
    t = rtable.generate(10**6, 13 * 10**5)
    assert t.groups[0][0] == 1000003 == primes_in_range(10**6 - 1, 10**6 + 100)[0]


@pytest.mark.parametrize("lo, hi", [(5, 5), (10, 3), (1, 10), (10, 2**64)])
def test_generate_rejects_bad_range(lo, hi):
    with pytest.raises(InvalidArgument):
        rtable.generate(lo, hi)


def test_default_table_invariants(table):
    assert len(table) > 50
    prev_last = 0
    for g in table.groups:
        assert len(g) == 5 and len(set(g)) == 5
        assert all(deterministic_prime(p) for p in g)
        assert g[0] > prev_last
        prev_last = g[-1]
    firsts = [g[0] for g in table.groups]
    ratios = [b / a for a, b in zip(firsts[5:], firsts[6:])]
    assert all(1.15 < r < 1.35 for r in ratios)


def test_select():
    t = rtable.RTable(((101, 103, 107, 109, 113),))
    assert rtable.select(t, 97, 0) == 101
    assert rtable.select(t, 97, 4) == 113
    assert [rtable.select(t, 97, k) for k in range(5)] == sorted({rtable.select(t, 97, k) for k in range(5)})
    with pytest.raises(rtable.TableExhausted):
        rtable.select(t, 101, 0)
    with pytest.raises(InvalidArgument):
        rtable.select(t, 97, 5)


def test_store_load_roundtrip(tmp_path, table):
    path = tmp_path / "r.txt"
    rtable.store(table, path)
    assert rtable.load(path) == table
    assert rtable.load(path).digest() == table.digest()


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10**9), st.floats(1.3, 40.0))
def test_roundtrip_property(lo, factor):
    t = rtable.generate(lo, int(lo * factor) + 1)
    assert rtable.loads(t.dumps()) == t


def test_load_rejects_composite(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 101\n0 103\n0 105\n0 107\n0 109\n")
    with pytest.raises(rtable.TableFormatError):
        rtable.load(path)


def test_load_rejects_short_class():
    with pytest.raises(rtable.TableFormatError):
        rtable.loads("0 101\n0 103\n")
