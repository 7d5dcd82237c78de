"""chebbias: Chebyshev-bias verification for composites with restricted
prime divisors.

Exact segmented sieving, high-precision evaluation of the density constants
(Landau-Ramanujan K and K2, the residue-class constants C_{d,a} and their
second-order companions), effective sandwich bounds for the summatory
functions, and end-to-end certificates for the count inequalities such as
N(x; 4, 3) >= N(x; 4, 1).
"""

from .hpreal import (
    DEFAULT_PREC,
    AgmState,
    HPReal,
    agm,
    agm_sequence,
    const_gamma,
    const_pi,
    gamma_fraction,
)
from .lfunc import (
    CHI3,
    CHI4,
    DirichletCharacter,
    l1_class_number,
    l_prime,
    l_value,
    logderiv_agm,
    logderiv_series,
    zeta,
    zeta_prime,
)
from .sieve import PrimePower, PrimePowerList, SieveMemoryError, SieveTables
from .multfun import (
    ALL_PRIMES,
    B1,
    G_3_1,
    G_3_2,
    G_4_1,
    G_4_3,
    SemigroupSpec,
    SummatorySeries,
    convolution_residual,
    export_grid,
    lambda_f,
    lambda_from_psi_residual,
    m_from_lambda_residual,
    member,
    series_for,
)
from .constants import (
    ConstantResult,
    b_constant,
    c_constant,
    constant_by_name,
    k2_series_partial,
    prime_sum,
    second_order,
)
from .bounds import (
    CertificateResult,
    SandwichBounds,
    ScanResult,
    drift_scan,
    grh_envelope,
    mu_sandwich,
    mu_sandwich_refined,
    propagation_certificate,
    psi_linear_check,
    scan_extremum,
    squarefree_remainder_scan,
)
from .races import (
    Corollary2Report,
    PipelineReport,
    TransferReport,
    corollary2_check,
    race,
    theorem2_pipeline,
    transfer_check,
)
from .verdict import BiasVerdict, Violation

__version__ = "0.1.0"
