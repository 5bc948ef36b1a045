from hyperent.protocols.base_protocol import (
    BaseProtocol,
    ProtocolReport,
    get_protocol,
    register_protocol,
    registered_protocols,
)
from hyperent.protocols.bell_analysis import hbsa, hbsa_branches, single_photon, swap, teleport
from hyperent.protocols.concentration import ecp_param_split, ecp_qnd_iterative, ecp_schmidt_linear, ecp_timebin
from hyperent.protocols.gates import cnot_cnot_reference, hyper_cnot, induced_operators
from hyperent.protocols.purification import hyper_epp_full, hyper_epp_step1, hyper_epp_step2
from hyperent.protocols.states import (
    classify_hyper_bell,
    dof_fidelities,
    make_bell,
    make_hyper_bell,
    make_hyper_ghz,
    make_mixed,
    make_partial,
    make_partial_timebin,
    make_timebin_hyper_bell,
)
