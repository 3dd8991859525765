"""Contact Hamiltonian and Lagrangian mechanics on (possibly nontrivial) line bundles."""

from .atlas import (
    AtiyahCoords,
    BundleAtlas,
    Chart,
    ContactCoords,
    CoverCoords,
    Overlap,
    moebius,
    pushforward_contact_tangent,
    transition_atiyah,
    transition_contact,
    trivial,
    validate_atlas,
)
from .config import ScenarioConfig, integrate, load_config, parse_config
from .dynamics import contact_field, euler_lagrange_rhs, herglotz_rhs, lagrangian_implicit, lifted_field
from .errors import *  # noqa: F401,F403
from .expr import eval_jet2, eval_value, parse, to_source
from .integrate import Trajectory, integrate_section
from .jet import Jet
from .legendre import (
    LegendreDiagnostics,
    hamiltonian_from_lagrangian,
    hyperregularity_probe,
    invert_legendre,
    lagrangian_from_hamiltonian,
    legendre_from_hamiltonian,
    legendre_from_lagrangian,
)
from .scenarios import builtin_scenarios
from .sections import ScalarSection, from_expr
from .triple import (
    R_iso,
    alpha,
    alpha0,
    alpha0_inverse,
    anchor,
    beta,
    beta0,
    beta0_inverse,
    hamiltonian_jet,
    lagrangian_jet,
    pairing,
    symplectic_residual,
)
from .verify import VerifyReport, verify

__version__ = "0.1.0"
