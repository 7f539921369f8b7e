from typing import Sequence

import numpy as np
import scipy.fft


def fft_workers() -> int:
    try:
        from django.conf import settings
        return max(1, int(settings.FFT_WORKERS))
    except Exception:
        return 1


def forward(values: np.ndarray, axes: Sequence[int] = None) -> np.ndarray:
    return scipy.fft.fftn(values, axes=axes, norm='ortho', workers=fft_workers())


def inverse(values: np.ndarray, axes: Sequence[int] = None) -> np.ndarray:
    return scipy.fft.ifftn(values, axes=axes, norm='ortho', workers=fft_workers())
