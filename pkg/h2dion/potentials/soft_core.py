"""
Soft-Coulomb interactions of the collinear H2 model (atomic units).
Both functions broadcast over numpy arrays.
"""
from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

NUCLEAR_SIGNS = (1.0, -1.0)


def v_en(r: ArrayLike, z: ArrayLike, beta: ArrayLike) -> ArrayLike:
    """
    Electron-nuclei attraction of one electron at z with the protons at -R/2 and +R/2.
    """
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    beta_squared = np.asarray(beta, dtype=float) ** 2
    result = -sum(1.0 / np.sqrt((z + s * r / 2.0) ** 2 + beta_squared) for s in NUCLEAR_SIGNS)
    return result if np.ndim(result) else float(result)


def v_ee(z1: ArrayLike, z2: ArrayLike, alpha: ArrayLike) -> ArrayLike:
    """
    Electron-electron repulsion, maximal (1/alpha) at z1 == z2.
    """
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    result = 1.0 / np.sqrt((z1 - z2) ** 2 + np.asarray(alpha, dtype=float) ** 2)
    return result if np.ndim(result) else float(result)


def v_nn(r: ArrayLike) -> ArrayLike:
    return 1.0 / np.asarray(r, dtype=float) if np.ndim(r) else 1.0 / float(r)
