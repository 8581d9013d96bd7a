from pathlib import Path

import numpy as np
import pytest

from blocksweep import BlockVector, OperatorFamily

REPO_ROOT = Path(__file__).resolve().parents[1]
CONFIG_DIR = REPO_ROOT / "configs"


@pytest.fixture
def rng():
    return np.random.default_rng(20240808)


@pytest.fixture
def config_dir():
    return CONFIG_DIR


class ConstantFamily(OperatorFamily):
    """Test family mapping every point straight to its fixed point."""

    def __init__(self, target: BlockVector):
        self.dims = target.dims
        self._fixed_point = target

    def apply_block(self, i, n, x):
        return self._fixed_point.blocks[i].copy()

    def tau(self, i, n):
        return 0.0


class SwapHalveFamily(OperatorFamily):
    """Two scalar blocks: T x = (x_2 / 2, x_1 / 2), fixed point zero."""

    def __init__(self):
        self.dims = (1, 1)
        self._fixed_point = BlockVector([[0.0], [0.0]])

    def apply_block(self, i, n, x):
        blocks = x.blocks if isinstance(x, BlockVector) else x
        return 0.5 * blocks[1 - i]

    def tau(self, i, n):
        return 0.25


@pytest.fixture
def constant_family():
    return ConstantFamily(BlockVector([[1.0, -2.0], [0.5]]))


@pytest.fixture
def swap_family():
    return SwapHalveFamily()
