"""Bounds on submodules of (Z/nZ)^m acted on abelianly by subgroups of GL_m or Sp(2m)."""

from .bounds import (BoundReport, HypothesisViolation, acts_abelianly, compute_J, gl_bound,
                     intermediate_bound, lower_target, sp_bound, verify_instance)
from .groups import (AmbientGroup, CapacityError, GroupHandle, closure, enumerate_ambient, gl_order,
                     index, reduction_check, sp_order)
from .matmod import MatrixMod, block_relations, commutes_on, is_symplectic, omega
from .modring import RingSpec, crt_combine, crt_split, factorize, valuation
from .search import (SearchConfig, enumerate_invariant_submodules, enumerate_subgroups, exhaustive_verify,
                     extremal_search)
from .submodules import (Submodule, SubmoduleShape, canonical_shape, is_invariant, l_primary_parts,
                         stabilizer_pattern, submodule_order)

__version__ = "0.1.0"
