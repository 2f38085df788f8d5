import itertools
import os
import shutil
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cycterm.words import Alphabet, Rule, Srs

settings.register_profile("repo", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large,
                                                 HealthCheck.large_base_example])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

CORPUS = Path(__file__).resolve().parents[1] / "src" / "cycterm" / "corpus"
Z3 = shutil.which("z3")

LETTERS = "abcd"


def words(n_letters, max_len, min_len=0):
    for n in range(min_len, max_len + 1):
        yield from itertools.product(range(n_letters), repeat=n)


def alphabet(n):
    return Alphabet(tuple(LETTERS[:n]))


def rotations(w):
    w = tuple(w)
    return [w[k:] + w[:k] for k in range(len(w))] or [w]


def min_rotation(w):
    """Oracle: least of all rotations."""
    return min(rotations(w))


def cycle_successors_oracle(srs, u):
    """Rotate, then rewrite at the front, then canonicalize by brute force."""
    out = set()
    u = tuple(u)
    for k in range(len(u)):
        rot = u[k:] + u[:k]
        for i, r in enumerate(srs.rules):
            if len(r.lhs) <= len(rot) and rot[:len(r.lhs)] == r.lhs:
                out.add((i, min_rotation(r.rhs + rot[len(r.lhs):])))
    return out


def string_step_ok(srs, w, i, p, v):
    """Independent check of one string step."""
    r = srs.rules[i]
    return 0 <= p and w[p:p + len(r.lhs)] == r.lhs and w[:p] + r.rhs + w[p + len(r.lhs):] == v


def all_rules(n_letters, max_size, min_lhs=1):
    """Every rule (lhs, rhs) with |lhs| >= 1 and |lhs| + |rhs| <= max_size."""
    out = []
    for m in range(min_lhs, max_size + 1):
        for lhs in itertools.product(range(n_letters), repeat=m):
            for k in range(0, max_size - m + 1):
                for rhs in itertools.product(range(n_letters), repeat=k):
                    out.append((lhs, rhs))
    return out


def small_systems(n_letters=2, max_rules=2, max_size=3):
    rules = all_rules(n_letters, max_size)
    alpha = alphabet(n_letters)
    for k in range(1, max_rules + 1):
        for combo in itertools.combinations(rules, k):
            yield Srs(alpha, [Rule(l, r) for l, r in combo])


@st.composite
def srs_st(draw, max_letters=3, max_rules=3, max_lhs=3, max_rhs=3, relative=False):
    n = draw(st.integers(1, max_letters))
    sym = st.integers(0, n - 1)
    k = draw(st.integers(1, max_rules))
    rules = []
    for _ in range(k):
        lhs = tuple(draw(st.lists(sym, min_size=1, max_size=max_lhs)))
        rhs = tuple(draw(st.lists(sym, min_size=0, max_size=max_rhs)))
        strict = draw(st.booleans()) if relative else True
        rules.append(Rule(lhs, rhs, strict))
    if relative and not any(r.strict for r in rules):
        rules[0] = Rule(rules[0].lhs, rules[0].rhs, True)
    return Srs(alphabet(n), rules)


def word_st(n_letters, min_size=0, max_size=6):
    return st.lists(st.integers(0, n_letters - 1), min_size=min_size, max_size=max_size).map(tuple)


@pytest.fixture
def corpus_dir():
    return CORPUS


def random_typed_system(rnd, n_symbols=None, n_types=None, max_rules=3, max_len=4):
    """A random typed signature and a well-typed SRS over it (collapsing rules included)."""
    from cycterm.typed import TypedSignature, well_typed_srs, word_type

    n = n_symbols or rnd.randint(1, 4)
    k = n_types or rnd.randint(1, 3)
    sig = TypedSignature({a: (rnd.randrange(k), rnd.randrange(k)) for a in range(n)})

    def typed_word(length, src=None, tgt=None):
        # grow right to left: the next symbol's target must be the current source
        for _ in range(50):
            out = []
            need = src
            ok = True
            for _ in range(length):
                cands = [a for a in range(n) if need is None or sig.source(a) == need]
                if not cands:
                    ok = False
                    break
                a = rnd.choice(cands)
                out.append(a)
                need = sig.target(a)
            if ok and (tgt is None or need == tgt):
                return tuple(reversed(out))
        return None

    rules = []
    for _ in range(rnd.randint(1, max_rules)):
        lhs = typed_word(rnd.randint(1, max_len))
        if lhs is None:
            continue
        s, t = word_type(sig, lhs)
        if s == t and rnd.random() < 0.3:
            rules.append(Rule(lhs, ()))
            continue
        rhs = typed_word(rnd.randint(1, max_len), s, t)
        if rhs is not None:
            rules.append(Rule(lhs, rhs))
    R = Srs(Alphabet(tuple(f"s{a}" for a in range(n))), rules)
    assert well_typed_srs(sig, R)
    return sig, R, typed_word


def check_simulation(out, u, rule, offset, full=True):
    """Reason string for the first problem with simulate_step on this cycle step, or None.

    full=True validates every step against string_successors of the transformed system,
    otherwise with the direct redex check (used by the exhaustive sweep for speed)."""
    from cycterm.transform import backmap, shape_classify, simulate_step, start_word
    from cycterm.typed import word_type
    from cycterm.words import cycle_step, string_successors

    v = cycle_step(out.source, u, rule, offset)
    d = simulate_step(out, u, rule, offset)
    if d.start != start_word(out, u):
        return "derivation does not start at B u E"
    if not d.steps:
        return "empty derivation"
    cur = d.start
    source_steps = 0
    for i, p, nxt in d.steps:
        if full:
            if (i, p, nxt) not in string_successors(out.srs, cur):
                return f"invalid step {i} at {p}"
        elif not string_step_ok(out.srs, cur, i, p, nxt):
            return f"invalid step {i} at {p}"
        if word_type(out.typing, nxt) != ("K", "T"):
            return "intermediate word is not of type K -> T"
        shape_classify(out, nxt)
        source_steps += out.family(i) in ("splitA", "splitF")
        cur = nxt
    end = d.end
    if end[0] != out.m("B") or end[-1] != out.m("E"):
        return "derivation does not end in B v' E"
    if min_rotation(end[1:-1]) != min_rotation(v):
        return "end is not a rotation of the target"
    images = backmap(out, end)
    if len(images) != 1 or min_rotation(images[0]) != min_rotation(v):
        return "end does not map back to [v]"
    if out.kind.value == "split" and source_steps != 1:
        return "split simulation must use exactly one splitA or splitF step"
    return None


def all_cycle_steps(srs, u):
    from cycterm.words import cycle_redexes
    return sorted({(i, k) for i, k, _ in cycle_redexes(srs, u)})


def edge_check(out, w, i, w2):
    """Typing, shape and back-map lemma for one transformed step w -> w2 (rule i).
    Returns a reason string or None."""
    from cycterm.transform import TransformKind, backmap, shape_classify
    from cycterm.typed import word_type
    from cycterm.words import cycle_successors, string_successors

    src = out.source
    one_step = {TransformKind.SPLIT: ("splitA", "splitF"), TransformKind.SHIFT: ("shiftH",),
                TransformKind.ROTATE: ("rotO",)}[out.kind]
    if word_type(out.typing, w2) != ("K", "T"):
        return "step leaves type K -> T"
    shape_classify(out, w2)
    before, after = backmap(out, w), backmap(out, w2)
    fam = out.family(i)
    if out.kind is TransformKind.ROTATE:
        if fam == "rotO":
            (x,), (y,) = before, after
            if not any(v == y for _, _, v in string_successors(src, x)):
                return f"{fam}: back-map is not a string step"
        elif not all(any(min_rotation(a) == min_rotation(b) for a in before) for b in after):
            return f"{fam}: image not related to a preimage"
    else:
        (x,), (y,) = before, after
        if fam in one_step:
            if all(c != min_rotation(y) for _, c in cycle_successors(src, min_rotation(x))):
                return f"{fam}: back-map is not one cycle step"
        elif min_rotation(x) != min_rotation(y):
            return f"{fam}: back-map changed the cycle"
    return None


def walk_check(out, u, rnd, length=30, max_word=24):
    """Random derivation in out.srs from B u E, checking every step with edge_check."""
    from cycterm.transform import start_word
    from cycterm.words import string_successors

    w = start_word(out, u)
    for _ in range(length):
        succ = sorted(s for s in string_successors(out.srs, w) if len(s[2]) <= max_word)
        if not succ:
            return None
        i, p, w2 = rnd.choice(succ)
        bad = edge_check(out, w, i, w2)
        if bad:
            return bad
        w = w2
    return None


def bfs_check(out, u, max_states=40, max_word=16):
    """Every edge among the first max_states words reachable from B u E."""
    from collections import deque
    from cycterm.transform import start_word
    from cycterm.words import string_successors

    w0 = start_word(out, u)
    seen = {w0}
    q = deque([w0])
    while q:
        w = q.popleft()
        for i, p, w2 in sorted(string_successors(out.srs, w)):
            if len(w2) > max_word:
                continue
            bad = edge_check(out, w, i, w2)
            if bad:
                return bad
            if w2 not in seen and len(seen) < max_states:
                seen.add(w2)
                q.append(w2)
    return None


def random_value(rnd, kind, bound=4, p_zero=0.25):
    from cycterm.matrices import zero
    return zero(kind) if rnd.random() < p_zero else rnd.randint(0, bound)


def random_matrix(rnd, kind, d, bound=4, member=True):
    """Random d x d matrix; with member=True it satisfies the A11 constraint of M."""
    from cycterm.matrices import in_M
    while True:
        A = tuple(tuple(random_value(rnd, kind, bound) for _ in range(d)) for _ in range(d))
        if not member or in_M(kind, A):
            return A


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
