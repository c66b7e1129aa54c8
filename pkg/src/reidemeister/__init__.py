"""Twisted conjugacy classes of finite groups and the subgroup condition on ``[e]_phi``."""

__version__ = "0.1.0"

from .errors import GroupError, SpecError, TooLargeError, VerificationError
from .groups import (
    Automorphism,
    ElementSet,
    Group,
    build_abelian,
    build_cyclic,
    direct_product,
    enumerate_automorphisms,
    inner_automorphism,
    semidirect_product,
)
from .report import CheckReport
from .twisted import check_condition, e_class, reidemeister_number, twisted_class
