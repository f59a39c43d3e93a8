"""Orlicz addition of measures and its verification toolkit.

Submodules: ``gauges`` (compositor functions), ``addition`` (the
implicit Orlicz sum), ``divergence``, ``variation`` (the f-divergence
as a first variation), ``harness`` (inequality suites), ``stargeo``
(star bodies), ``affine`` (polar duals and Orlicz surface areas),
``fileio``, and ``cli``.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["__version__", "KERNEL_BACKEND"]
