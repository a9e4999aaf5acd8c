import warnings

import numpy as np
import pytest

from mmadoa.basis import BasisKind, BasisSpec
from mmadoa.calibration import synth_antenna
from mmadoa.models import fit_wm, fit_wm_gain


@pytest.fixture(autouse=True)
def _silence_fit_warnings():
    # Several fixtures fit close to the U << Q guideline on purpose.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        yield


@pytest.fixture(scope="session")
def planar_antenna():
    """Band-limited planar antenna plus exact complex and gain fits."""
    cal, truth = synth_antenna(seed=12, num_ports=4, degree=5, mode="xz-cut-2d")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        response = fit_wm(cal, BasisSpec(BasisKind.FOURIER_1D, 11))
        gain = fit_wm_gain(cal, BasisSpec(BasisKind.REAL_FOURIER_1D, 21))
    return {"cal": cal, "truth": truth, "response": response, "gain": gain}


@pytest.fixture(scope="session")
def sphere_antenna():
    """Band-limited full-sphere antenna plus exact fits."""
    cal, truth = synth_antenna(seed=21, num_ports=4, degree=4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        response = fit_wm(cal, BasisSpec(BasisKind.COMPLEX_SH, 25))
        gain = fit_wm_gain(cal, BasisSpec(BasisKind.REAL_SH, 81))
    return {"cal": cal, "truth": truth, "response": response, "gain": gain}


def numeric_hessian(function, x0, steps):
    """Central-difference Hessian used by the Fisher-information oracles."""
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    hessian = np.zeros((n, n))
    f0 = function(x0)
    for i in range(n):
        for j in range(i, n):
            hi, hj = steps[i], steps[j]
            if i == j:
                xp, xm = x0.copy(), x0.copy()
                xp[i] += hi
                xm[i] -= hi
                hessian[i, i] = (function(xp) - 2.0 * f0 + function(xm)) / hi**2
            else:
                xpp, xpm, xmp, xmm = x0.copy(), x0.copy(), x0.copy(), x0.copy()
                xpp[[i, j]] += [hi, hj]
                xpm[i] += hi
                xpm[j] -= hj
                xmp[i] -= hi
                xmp[j] += hj
                xmm[[i, j]] -= [hi, hj]
                value = (function(xpp) - function(xpm) - function(xmp) + function(xmm)) / (
                    4.0 * hi * hj
                )
                hessian[i, j] = hessian[j, i] = value
    return hessian
