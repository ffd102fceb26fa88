"""Shared fixtures and seeded random model generators."""

import random

import pytest

from obscheck.lts import And as LAnd
from obscheck.lts import Atom, Lts
from obscheck.lts import Not as LNot
from obscheck.lts import Or as LOr
from obscheck.lts import Top
from obscheck.pathregex import One, PathRegex, Star, Tick, Union, seq_of
from obscheck.timednet import builtin_present, explore, parse_net

LABELS = ("a", "b", "t", "z")

ZENO_NET = """
var x : 0..2 = 0

process Universal
init u0
from u0 on a do x := 1 to u0
from u0 on b do x := 2 to u0
from u0 on z when x != 0 do x := 0 urgent to u0

process Spinner
init idle
from idle probe b when elapsed in [0,w[ label hook to spin
from spin elapse [0,0] urgent label spin to spin
"""


def random_label_expr(rng: random.Random, depth: int = 2):
    roll = rng.random()
    if depth == 0 or roll < 0.55:
        return Atom(rng.choice(LABELS))
    if roll < 0.65:
        return Top()
    if roll < 0.8:
        return LNot(random_label_expr(rng, depth - 1))
    if roll < 0.9:
        return LOr(random_label_expr(rng, depth - 1), random_label_expr(rng, depth - 1))
    return LAnd(random_label_expr(rng, depth - 1), random_label_expr(rng, depth - 1))


def random_step(rng: random.Random):
    roll = rng.random()
    if roll < 0.4:
        return One(random_label_expr(rng))
    if roll < 0.8:
        return Star(random_label_expr(rng))
    return Tick()


def random_regex(rng: random.Random, max_steps: int = 5) -> PathRegex:
    out = None
    for _ in range(rng.randint(1, 3)):
        branch = seq_of(random_step(rng) for _ in range(rng.randint(0, max_steps)))
        out = branch if out is None else Union(out, branch)
    return out


def random_lts(rng: random.Random, max_states: int = 12, max_labels: int = 4) -> Lts:
    n = rng.randint(1, max_states)
    labels = rng.sample(LABELS, rng.randint(1, max_labels))
    edges = [
        (rng.randrange(n), rng.choice(labels), rng.randrange(n))
        for _ in range(rng.randint(0, 3 * n))
    ]
    return Lts(n, 0, edges, extra_labels=labels)


@pytest.fixture(scope="session")
def present45_graph():
    return explore(builtin_present(4, 5))


@pytest.fixture(scope="session")
def zeno_graph():
    return explore(parse_net(ZENO_NET))


def chain_lts(*labels: str) -> Lts:
    """0 -l1-> 1 -l2-> 2 ... along the given labels."""
    return Lts(len(labels) + 1, 0, [(i, lab, i + 1) for i, lab in enumerate(labels)])
