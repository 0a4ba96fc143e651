"""Quantum-circuit construction, sparse simulation and resource accounting for
Shor's algorithm on elliptic-curve discrete logarithms at desk scale."""

from .circuit import (Circuit, Gate, QReg, ResourceReport, decompose_to_clifford_t,
                      export_gatelist, parse_gatelist, resource_report)
from .classical_ec import (INFINITY, Curve, curve_new, discrete_log_bruteforce, ec_add,
                           ec_double, ec_neg, ec_scalar_mul, is_on_curve, point_order)
from .ec_circuit import EcPointRegs, alloc_point, ctrl_ell_mult_add, ell_add_inpl
from .kaliski import KaliskiWorkspace, build_kaliski_round, kaliski_classical, kaliski_quantum
from .montgomery import (inplace_mul_const, montgomery_addition, montgomery_mul,
                         to_montgomery_classical, to_montgomery_qm, to_standard_qm)
from .qarith import (CUCCARO, GIDNEY, AdderBackend, ModReg, alloc_modreg, build_adder,
                     build_comparator_gt, build_cyclic_shift, build_subtractor,
                     inpl_rsub, mod_adder, mod_double, mod_sub)
from .shor import (ShorInstance, build_qft, build_shor_circuit, ideal_distribution,
                   postprocess, run_shor, shor_instance)
from .simulator import (SparseState, dense_amplitudes, exact_distribution, run, sample)
from .uncompute import conjugate, uncompute_by_replay

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
