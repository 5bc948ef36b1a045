from hyperent.optics.cavity import (
    CavityParams,
    cavity_limits,
    dof_swap,
    hybrid_cnot_block,
    parity_readout,
    phase_readout,
    prepare_spins,
    ps_parity_qnd,
    ps_qnd,
    qd_coefficients,
    qd_scatter_ideal,
    qsjm,
    qsjm_spatial,
    spin_hadamard,
    spin_measure,
)
from hyperent.optics.elements import ElementKind, ElementOp, element
from hyperent.optics.kerr import ProbeClass, ProbeOutcome, xkerr_parity_pol, xkerr_parity_spatial
from hyperent.optics.kerr import xkerr_spatial_analyzer
from hyperent.optics.linear import (
    apply_local,
    bs_hom_parity,
    detect,
    hadamard_both,
    hadamard_pol,
    hadamard_spatial,
    pbs_parity_check,
    pockels,
    ubs_split,
    unbalanced_interferometer,
)
