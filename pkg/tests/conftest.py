"""Shared meshes, built once per session.

The coarse disk has 24 boundary facets, which puts adjacent facet normals
exactly at the smooth/corner threshold; it doubles as a regression mesh
for the inclusive-threshold convention.
"""

import numpy as np
import pytest

from formspect import mesh as meshmod


@pytest.fixture(scope="session")
def disk_coarse():
    return meshmod.gen_disk(1.0, 0.3)


@pytest.fixture(scope="session")
def disk_h01():
    return meshmod.gen_disk(1.0, 0.1)


@pytest.fixture(scope="session")
def unit_square():
    return meshmod.gen_polygon([(0, 0), (1, 0), (1, 1), (0, 1)], 0.4)


@pytest.fixture(scope="session")
def ref_triangle():
    return meshmod.gen_polygon([(0, 0), (1, 0), (0, 1)], 0.6)


@pytest.fixture(scope="session")
def lshape():
    return meshmod.gen_polygon(
        [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)], 0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
