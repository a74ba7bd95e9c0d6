"""Success probabilities and bounds for collective work extraction from N diagonal copies."""
from .asymptotics import gamma_fixed_error, gamma_logN_schedule, min_copies
from .bath_work import (
    bath_bound,
    bath_bound_coefficient,
    bath_exact_success,
    extractable_work_bath,
    free_energy,
)
from .qubit_work import (
    exact_success_qubits,
    hoeffding_bound,
    local_protocol_distribution,
    min_spins_bound,
    min_spins_exact,
    qubit_ergotropy,
    relent_bound,
)
from .qudit_work import (
    DiagonalState,
    IsolatedOptimizer,
    bound_coefficient,
    entropy_matched_thermal,
    ergotropy,
    exact_isolated_success,
    global_ergotropy_rate,
    isolated_bound,
    passive_state,
    protocol_success,
    qubit_state,
    shift_vector,
)

__version__ = "0.1.0"
