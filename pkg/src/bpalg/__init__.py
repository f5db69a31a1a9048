"""Norm computations for algebras of coefficient functions on finite groups.

Modules
-------
groups      finite groups, functions, convolution, regular matrices
lp          vector p-norms, induced operator norms, quotient norms
repspace    subquotient spaces and isometric representations
tensor      tensor norm, tensor representations, Fell intertwiner
normbench   primal and dual norm brackets, oracles, multiplier norm
experiment  experiment grids behind the ``bpalg`` command
"""

__version__ = "0.1.0"

from .groups import (FiniteGroup, GroupFunction, build_group, characters, constant, convolve,
                     cyclic, delta, dihedral, direct_product, random_function, regular_matrix,
                     symmetric)
from .lp import PNorm, op_norm, quotient_norm, vec_norm
from .normbench import (CoeffDecomposition, NormBracket, ap_norm_primal, bp_dual_norm,
                        bp_norm_bracket, fourier_oracle_p2, functional_to_function,
                        inclusion_check, multiplier_norm, pf_norm)
from .repspace import (DualVector, Representation, SubquotientSpace, check_representation,
                       coefficient_function, cyclic_subrep, dual_space, direct_sum,
                       make_regular, make_trivial)
from .tensor import (TensorElement, fell_intertwiner, injective_norm, product_decomposition,
                     tensor_norm, tensor_rep, verify_fell)

__all__ = [name for name in dir() if not name.startswith("_")]
