import math

import numpy as np
import pytest

from chorddisc import ChordSet, chord_from_params, make_disk, make_polygon
from chorddisc.chordmeasure import EndpointMeasure


@pytest.fixture(scope="session")
def unit_disk():
    return make_disk((0.0, 0.0), 1.0)


@pytest.fixture(scope="session")
def unit_square():
    return make_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture(scope="session")
def hexagon():
    return make_polygon([(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)])


@pytest.fixture(scope="session")
def disk_measure(unit_disk):
    return EndpointMeasure(unit_disk)


@pytest.fixture(scope="session")
def square_measure(unit_square):
    return EndpointMeasure(unit_square)


def random_chord_set(body, n, seed):
    """Chords with uniformly random parameter pairs (not measure-distributed)."""
    rng = np.random.default_rng(seed)
    chords = []
    while len(chords) < n:
        s, t = rng.random(2)
        try:
            chords.append(chord_from_params(body, s, t))
        except Exception:
            continue
    return ChordSet(body, chords)
