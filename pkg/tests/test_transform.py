import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cycterm.tpdb import rules_by_name
from cycterm.transform import (ShapeError, TransformKind, backmap, rot_sigma_size, shape_classify,
                               shift_N, simulate_step, transform, transform_rel)
from cycterm.typed import well_typed_srs
from cycterm.words import Srs, SrsError, make_srs

from conftest import all_cycle_steps, check_simulation, srs_st, walk_check, word_st

KINDS = list(TransformKind)


def named(out, w):
    return tuple(out.srs.alphabet.name(s) for s in w)


def rules_as_text(out):
    return {(" ".join(l), " ".join(r)) for l, r, _ in rules_by_name(out.srs)}


def test_split_r1_is_the_eight_rule_system():
    out = transform(TransformKind.SPLIT, make_srs([("aa", "aba")]))
    assert rules_as_text(out) == {
        ("a a", "a b a"), ("#a~bar #L", "#L a"), ("#b~bar #L", "#L b"), ("#W #L", "#B"),
        ("#B a", "#W #R_1_1"), ("#R_1_1 a #E", "#L a b a #E"),
        ("#R_1_1 a", "#a~bar #R_1_1"), ("#R_1_1 b", "#b~bar #R_1_1")}
    assert len(out.srs.rules) == 8


def test_split_r2_listing():
    out = transform(TransformKind.SPLIT, make_srs([("abc", "cbacba"), ("aa", "a")]))
    expected = {("a b c", "c b a c b a"), ("a a", "a"), ("#W #L", "#B"),
                ("#B b c", "#W #R_1_1"), ("#B c", "#W #R_1_2"), ("#B a", "#W #R_2_1"),
                ("#R_1_1 a #E", "#L c b a c b a #E"), ("#R_1_2 a b #E", "#L c b a c b a #E"),
                ("#R_2_1 a #E", "#L a #E")}
    for x in "abc":
        expected.add((f"#{x}~bar #L", f"#L {x}"))
        for tag in ("R_1_1", "R_1_2", "R_2_1"):
            expected.add((f"#{tag} {x}", f"#{x}~bar #{tag}"))
    assert rules_as_text(out) == expected
    assert len(out.srs.rules) == 21


def test_rotate_example_system():
    R = make_srs([("aaa", "ababa")])
    out = transform(TransformKind.ROTATE, R)
    assert len(out.srs.rules) == rot_sigma_size(2) + 1
    last = out.rule_index(("rotO", 0))
    assert out.srs.show_rule(last) == "#W a a a -> #B a b a b a"
    assert sum(f == "rotO" for f, *_ in out.families) == 1


def test_shift_n_is_longest_lhs_minus_one():
    assert shift_N(make_srs([("abc", "a"), ("a", "b")])) == 2
    assert shift_N(make_srs([("a", "b")])) == 0
    empty = Srs(make_srs([("a", "a")]).alphabet, [])
    assert shift_N(empty) == 0
    out = transform(TransformKind.SHIFT, empty)
    assert not any(f == "shiftH" for f, *_ in out.families)
    assert well_typed_srs(out.typing, out.srs)
    out = transform(TransformKind.SHIFT, make_srs([("abc", "a")]))
    rule = out.srs.rules[out.rule_index(("shiftA",))]
    assert named(out, rule.rhs) == ("#W", "#M", "#M", "#V")


@pytest.mark.parametrize("kind", KINDS)
def test_alphabet_sizes_and_fresh_names(kind):
    R = make_srs([("abc", "cbacba"), ("aa", "a")])
    out = transform(kind, R)
    n = 3
    expected = {TransformKind.SPLIT: n + n + 4 + (2 + 1),
                TransformKind.SHIFT: n + 2 * n + 8,
                TransformKind.ROTATE: n + 4 * n + 11}[kind]
    assert len(out.srs.alphabet) == expected
    fresh = out.srs.alphabet.names[n:]
    assert all(x.startswith("#") for x in fresh)
    assert len(set(fresh)) == len(fresh)
    assert out.srs.alphabet.names[:n] == R.alphabet.names


def test_split_rel_strict_set():
    R = make_srs([("bc", "cb", False), ("abc", "bac")])
    out = transform_rel(TransformKind.SPLIT, R)
    strict = {out.srs.show_rule(i) for i in out.srs.strict_indices}
    assert strict == {"#R_2_1 a #E -> #L b a c #E", "#R_2_2 a b #E -> #L b a c #E", "a b c -> b a c"}


def test_shift_and_rotate_rel_strict_sets():
    R = make_srs([("ab", "ba")])
    out = transform_rel(TransformKind.SHIFT, R)
    assert {out.family(i) for i in out.srs.strict_indices} == {"shiftH"}
    assert len(out.srs.strict_indices) == 1
    out = transform_rel(TransformKind.ROTATE, R)
    assert [out.srs.show_rule(i) for i in out.srs.strict_indices] == ["#W a b -> #B b a"]
    assert all(not out.srs.rules[i].strict for i in range(len(out.srs.rules)) if out.family(i) != "rotO")


def test_relative_needs_a_strict_rule():
    R = make_srs([("ab", "ba", False)])
    with pytest.raises(SrsError):
        transform_rel(TransformKind.SPLIT, R)


def test_plain_transform_ignores_strictness():
    R = make_srs([("ab", "ba", False), ("a", "b")])
    for kind in KINDS:
        assert not transform(kind, R).srs.is_relative


# worked derivations

def test_split_derivation_of_aba():
    R = make_srs([("aa", "aba")], names=["a", "b"])
    out = transform(TransformKind.SPLIT, R)
    u = R.alphabet.word("aba")
    d = simulate_step(out, u, 0, 2)
    words = [" ".join(named(out, d.start))] + [" ".join(named(out, x)) for _, _, x in d.steps]
    assert words == ["#B a b a #E", "#W #R_1_1 b a #E", "#W #b~bar #R_1_1 a #E",
                     "#W #b~bar #L a b a #E", "#W #L b a b a #E", "#B b a b a #E"]


def test_rotate_derivation_of_abbaa():
    R = make_srs([("aaa", "ababa")])
    out = transform(TransformKind.ROTATE, R)
    u = R.alphabet.word("abbaa")
    d = simulate_step(out, u, 0, 3)
    fams = [out.family(i) for i, _, _ in d.steps]
    assert fams == (["rotB"] + ["rotC"] * 2 + ["rotD"] + ["rotF"] * 3 + ["rotG"] + ["rotH"] * 3 + ["rotI"]
                    + ["rotF"] * 3 + ["rotG"] + ["rotH"] * 3 + ["rotJ"] + ["rotK"] * 3 + ["rotL"]
                    + ["rotM"] * 2 + ["rotN", "rotO"])
    assert named(out, d.steps[-2][2]) == ("#W", "a", "a", "a", "b", "b", "#E")
    assert named(out, d.end) == ("#B", "a", "b", "a", "b", "a", "b", "b", "#E")


def test_shift_derivation_without_rotation():
    R = make_srs([("ab", "ba"), ("abc", "c")])
    out = transform(TransformKind.SHIFT, R)
    u = R.alphabet.word("abca")
    d = simulate_step(out, u, 0, 0)
    fams = [out.family(i) for i, _, _ in d.steps]
    N = shift_N(R)
    assert fams == ["shiftA"] + ["shiftB"] * N + ["shiftF", "shiftH", "shiftJ"]
    assert check_simulation(out, u, 0, 0) is None


def test_invalid_step_description_is_rejected():
    R = make_srs([("aa", "aba")])
    out = transform(TransformKind.SPLIT, R)
    with pytest.raises(SrsError):
        simulate_step(out, R.alphabet.word("ab"), 0, 0)
    with pytest.raises(SrsError):
        simulate_step(out, (), 0, 0)


# shapes and back-maps

def test_shape_and_backmap_examples():
    R = make_srs([("aa", "aba")], names=["a", "b"])
    sp = transform(TransformKind.SPLIT, R)
    m = sp.m
    assert shape_classify(sp, (m("B"), 0, m("E"))) == 1
    assert backmap(sp, (m("B"), 0, 1, m("E"))) == [(0, 1)]
    assert backmap(sp, (m("W"), m("L"), m("E"))) == [()]

    sh = transform(TransformKind.SHIFT, R)
    w = (sh.m("R"), sh.copies["C"][0], sh.m("D"), 0, sh.m("E"))
    assert shape_classify(sh, w) == 4

    ro = transform(TransformKind.ROTATE, R)
    assert shape_classify(ro, (ro.m("W"), 0, ro.m("E"))) == 7
    w = (ro.m("O"), ro.copies["E"][0], ro.m("C"), ro.copies["D"][0], ro.m("G"), 1, ro.m("E"))
    assert shape_classify(ro, w) == 4
    assert backmap(ro, w) == [(0, 0, 1), (0, 1, 0)]


def test_unclassifiable_word_is_an_error():
    out = transform(TransformKind.SPLIT, make_srs([("aa", "aba")]))
    with pytest.raises(ShapeError):
        shape_classify(out, (out.m("E"), 0, out.m("B")))


@pytest.mark.parametrize("kind", KINDS)
def test_worked_systems_are_well_typed(kind):
    for R in (make_srs([("aa", "aba")]), make_srs([("abc", "cbacba"), ("aa", "a")]),
              make_srs([("P0", "P100"), ("0P", "1P"), ("1P", "cP"), ("0c", "10"), ("1c", "c0")])):
        out = transform(kind, R)
        assert well_typed_srs(out.typing, out.srs)
        assert out.typing.covers(len(out.srs.alphabet))


# properties

@settings(max_examples=300)
@given(srs_st(max_letters=3, max_rules=2, max_lhs=3, max_rhs=3), word_st(3, 1, 5),
       st.sampled_from(KINDS), st.randoms(use_true_random=False))
def test_simulation_soundness(R, u, kind, rnd):
    u = tuple(s % len(R.alphabet) for s in u)
    out = transform(kind, R)
    steps = all_cycle_steps(R, u)
    if steps:
        i, k = rnd.choice(steps)
        assert check_simulation(out, u, i, k) is None


@settings(max_examples=300)
@given(srs_st(max_letters=3, max_rules=2, max_lhs=3, max_rhs=3, relative=True), word_st(3, 0, 5),
       st.sampled_from(KINDS), st.randoms(use_true_random=False))
def test_backmap_lemmas_on_random_derivations(R, u, kind, rnd):
    u = tuple(s % len(R.alphabet) for s in u)
    out = transform_rel(kind, R)
    assert well_typed_srs(out.typing, out.srs)
    assert walk_check(out, u, rnd) is None


def test_backmap_checker_detects_a_broken_rule():
    # the oracle must notice when a transformed rule does not respect the back-map
    from cycterm.words import Rule
    R = make_srs([("ab", "ba")])
    out = transform(TransformKind.SPLIT, R)
    broken = list(out.srs.rules)
    i = out.rule_index(("splitB", 0))
    broken[i] = Rule(broken[i].lhs, (out.m("L"), 1))  # abar L -> L b
    bad = type(out)(out.kind, out.source, Srs(out.srs.alphabet, broken), out.typing, out.markers,
                    out.copies, out.families)
    rnd = random.Random(0)
    assert any(walk_check(bad, (0, 0, 1), rnd, 60) is not None for _ in range(50))
