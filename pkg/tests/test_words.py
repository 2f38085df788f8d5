import pytest
from hypothesis import given
from hypothesis import strategies as st

from cycterm.words import (Alphabet, Rule, Srs, SrsError, TraceStep, canonical_rotation, check_name,
                           cycle_equal, cycle_step, cycle_successors, least_rotation, make_srs,
                           prefix_successors, relative_characterization_check, rotate,
                           string_successors, suffix_successors)

from conftest import (cycle_successors_oracle, min_rotation, rotations, small_systems, srs_st,
                      word_st, words)


def w(srs, text):
    return srs.alphabet.word(text)


# canonical rotation

def test_canonical_rotation_examples():
    assert canonical_rotation(()) == ()
    assert canonical_rotation((0, 1, 0)) == (0, 0, 1)
    assert canonical_rotation((0, 0, 0, 0)) == (0, 0, 0, 0)


def test_canonical_rotation_exhaustive_up_to_8():
    for u in words(3, 8):
        c = canonical_rotation(u)
        assert c == min_rotation(u)
        assert canonical_rotation(c) == c


def test_least_rotation_index_points_at_minimum():
    for u in words(2, 7, min_len=1):
        k = least_rotation(u)
        assert rotate(u, k) == min_rotation(u)


@given(word_st(4, max_size=12))
def test_canonical_is_idempotent_rotation(u):
    c = canonical_rotation(u)
    assert c in rotations(u)
    assert canonical_rotation(c) == c
    assert cycle_equal(u, c)


# cycle equality

def test_cycle_equal_examples():
    assert cycle_equal((0, 1), (1, 0))
    assert cycle_equal((), ())
    assert cycle_equal((0, 0, 1), (0, 1, 0))
    assert not cycle_equal((0, 0, 1), (0, 1, 1))
    assert not cycle_equal((0,), (0, 0))


def test_cycle_equal_matches_split_definition_exhaustively():
    ws = list(words(3, 6))
    by_len = {}
    for u in ws:
        by_len.setdefault(len(u), []).append(u)
    for n, group in by_len.items():
        for u in group:
            rots = {u[k:] + u[:k] for k in range(len(u))} or {u}
            for v in group:
                assert cycle_equal(u, v) == (v in rots)
                assert cycle_equal(u, v) == (canonical_rotation(u) == canonical_rotation(v))


# string, prefix and suffix steps

def test_string_successors_examples():
    R = make_srs([("ab", "ba")])
    assert string_successors(R, w(R, "ab")) == {(0, 0, w(R, "ba"))}
    assert string_successors(R, ()) == set()
    R = make_srs([("aa", "aba")])
    assert string_successors(R, w(R, "aaa")) == {(0, 0, w(R, "abaa")), (0, 1, w(R, "aaba"))}


@given(srs_st(), word_st(3, max_size=6))
def test_prefix_and_suffix_are_restrictions(R, u):
    u = tuple(s % len(R.alphabet) for s in u)
    all_steps = string_successors(R, u)
    assert prefix_successors(R, u) == {s for s in all_steps if s[1] == 0}
    assert suffix_successors(R, u) == {s for s in all_steps if s[1] == len(u) - len(R.rules[s[0]].lhs)}


# cycle steps

def test_cycle_successors_examples():
    R = make_srs([("ab", "ba")])
    assert cycle_successors(R, w(R, "ab")) == {(0, w(R, "ab"))}
    R = make_srs([("aa", "aba")])
    assert cycle_successors(R, w(R, "aab")) == {(0, canonical_rotation(w(R, "baba")))}
    assert cycle_successors(R, ()) == set()


def test_cycle_successors_wraparound_lhs_of_full_length():
    R = make_srs([("abc", "")])
    # every rotation of abc is a different class member; only the one equal to abc applies
    assert cycle_successors(R, w(R, "bca")) == {(0, ())}
    assert cycle_successors(R, w(R, "ab")) == set()


def test_cycle_successors_match_oracle_exhaustively():
    systems = list(small_systems(3, 1, 4))
    for R in systems:
        for u in words(3, 5, min_len=1):
            if u != canonical_rotation(u):
                continue
            assert cycle_successors(R, u) == cycle_successors_oracle(R, u), (R, u)


@given(srs_st(), word_st(3, max_size=6))
def test_string_steps_lift_to_cycle_steps(R, u):
    u = tuple(s % len(R.alphabet) for s in u)
    succ = cycle_successors(R, canonical_rotation(u))
    for i, _, v in string_successors(R, u):
        assert (i, canonical_rotation(v)) in succ


def test_cycle_step_and_errors():
    R = make_srs([("ab", "c")])
    assert cycle_step(R, w(R, "bca"), 0, 2) == w(R, "cc")
    with pytest.raises(SrsError):
        cycle_step(R, w(R, "bca"), 0, 0)
    with pytest.raises(SrsError):
        cycle_step(R, w(R, "a"), 0, 0)


# systems and names

def test_names_and_rules_are_validated():
    with pytest.raises(SrsError):
        Rule((), (0,))
    for bad in ("", "->", "->=", "a b", "(x", "#B"):
        with pytest.raises(SrsError):
            check_name(bad)
    check_name("#B", fresh=True)
    with pytest.raises(SrsError):
        Alphabet(("a", "a"))
    with pytest.raises(SrsError):
        Srs(Alphabet(("a",)), [Rule((0,), (1,))])


def test_ids_follow_first_appearance():
    R = make_srs([("P0", "P100"), ("0P", "1P")])
    assert R.alphabet.names == ("P", "0", "1")


def test_strict_and_weak_partition():
    R = make_srs([("ab", "ca"), ("c", "b", False)])
    assert R.strict_indices == [0] and R.weak_indices == [1]
    assert R.is_relative
    assert not R.all_strict().is_relative
    assert R.without([0]).rules == (R.rules[1],)


# relative characterization

def test_relative_trace_examples():
    R = make_srs([("ab", "ca"), ("c", "b", False)])
    ab, ca = w(R, "ab"), w(R, "ca")
    trace = [TraceStep(0, True, ca), TraceStep(1, False, ab)]
    assert relative_characterization_check(R, ab, trace)
    assert relative_characterization_check(R, ab, [])
    bad = [TraceStep(0, False, ca), TraceStep(1, False, ab)]
    res = relative_characterization_check(R, ab, bad)
    assert not res and res.bad_index == 0
    res = relative_characterization_check(R, ab, [TraceStep(0, True, ca), TraceStep(0, True, ab)])
    assert not res and res.bad_index == 1


def test_relative_trace_needs_a_strict_step():
    R = make_srs([("ab", "ca"), ("c", "b", False)])
    res = relative_characterization_check(R, w(R, "ac"), [TraceStep(1, False, w(R, "ab"))])
    assert not res


@given(srs_st(relative=True), word_st(3, 1, 5), st.integers(1, 6), st.randoms(use_true_random=False))
def test_random_walks_pass_and_perturbed_labels_fail(R, u, n, rnd):
    u = tuple(s % len(R.alphabet) for s in u)
    cur, trace = u, []
    for _ in range(n):
        succ = sorted(cycle_successors(R, canonical_rotation(cur)))
        if not succ:
            break
        i, v = rnd.choice(succ)
        trace.append(TraceStep(i, R.rules[i].strict, v))
        cur = v
    if any(t.strict for t in trace):
        assert relative_characterization_check(R, u, trace)
    if trace:
        k = rnd.randrange(len(trace))
        flipped = list(trace)
        flipped[k] = flipped[k]._replace(strict=not flipped[k].strict)
        res = relative_characterization_check(R, u, flipped)
        assert not res and res.bad_index <= k
