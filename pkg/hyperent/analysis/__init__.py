from hyperent.analysis import closed_forms
from hyperent.analysis.oracle import (
    Enumeration,
    Invocation,
    OracleComparison,
    SampleResult,
    binomial_bound,
    compare_oracle,
    enumerate,
    enumerate_branches,
    invocation,
    sample,
)
from hyperent.analysis.curves import curve_ecp_iteration, curve_epp_efficiency, curve_epp_fidelity, epp_trajectory
