"""Shared fixtures: the target corpus and standard grids."""

import pytest

import relu_jackson as rj


def build_corpus():
    """Named targets exercised by the sweeps; order is fixed."""
    return [
        ("const1", rj.make_trig_poly(1, {0: 1.0})),
        ("cos", rj.make_trig_poly(1, {1: 0.5, -1: 0.5})),
        (
            "mix1",
            rj.make_trig_poly(
                1,
                {1: 0.5, -1: 0.5, 3: 0.25, -3: 0.25, 2: 0.125j, -2: -0.125j},
            ),
        ),
        ("decay1", rj.make_decay_target(1, 3.2, 16, seed=11)),
        ("rate1", rj.make_decay_target(1, 3.2, 2, seed=11)),
        ("sin2d", rj.make_trig_poly(2, {(1, 1): -0.5j, (-1, -1): 0.5j})),
        ("decay2", rj.make_decay_target(2, 4.2, 8, seed=7)),
    ]


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def cos_target():
    return rj.make_trig_poly(1, {1: 0.5, -1: 0.5})


def torus_grid(target, points=None):
    return rj.default_grid(target.d, rj.TORUS, points)


def cube_grid(target, points=None):
    return rj.default_grid(target.d, rj.CUBE, points)
