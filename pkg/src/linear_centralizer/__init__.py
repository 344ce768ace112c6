"""Linear centralizer attacks on braid-group and matrix-group key exchanges."""

from .braid import Braid
from .ff import ExtCtx, make_ext_ctx, next_prime, prime_field
from .linalg import Matrix, SampleConfig, Subspace
from .lkrep import LKMatrix, lk_of_braid, lk_of_braid_mod
from .protocols import GroupCtx, SimulatedInstance, simulate

__all__ = [
    "Braid",
    "ExtCtx",
    "GroupCtx",
    "LKMatrix",
    "Matrix",
    "SampleConfig",
    "SimulatedInstance",
    "Subspace",
    "lk_of_braid",
    "lk_of_braid_mod",
    "make_ext_ctx",
    "next_prime",
    "prime_field",
    "simulate",
]
