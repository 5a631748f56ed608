"""Affine preferential-attachment graphs: exact growth, metrics, and
the degree/distance formulas needed to check them.

Quick start::

    from palab import make_params, generate
    g = generate(make_params("c", 2, -1), 10_000, seed=1)

Submodules: ``growth`` (generation), ``metrics`` (BFS, diameter,
components), ``structure`` (cores, layers, exploration trees),
``theory`` (closed forms), ``enumeration`` (exact tiny-horizon oracle),
``experiments`` (sweeps and verification suites), ``cli``.
"""

__version__ = "1.0.0"

from .params import VARIANTS, PAParams, as_fraction, make_params
from .graph import PAGraph, is_bundle
from .sampler import AttachmentSampler, randbelow
from .growth import collapse, freeze, generate, init, step

__all__ = [
    "__version__",
    "VARIANTS", "PAParams", "as_fraction", "make_params",
    "PAGraph", "is_bundle",
    "AttachmentSampler", "randbelow",
    "collapse", "freeze", "generate", "init", "step",
]
