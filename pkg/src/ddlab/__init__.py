"""Decision-diagram workbench.

Assignment algebra, CNF families over graphs, single-source diagrams with
decomposable conjunctions, alignment and restriction, upper-bound compilers,
and the fooling-set lower-bound pipeline — all desk scale and verified
against brute-force oracles.
"""

from .version import __version__, BUILD_ID
from .kernels import BACKEND as KERNEL_BACKEND

__all__ = ["__version__", "BUILD_ID", "KERNEL_BACKEND"]
