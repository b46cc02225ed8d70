"""
Numerical constants and defaults for the bipartite oscillator simulation.
Units: hbar = k_B = 1; energies and temperatures in units of omega1.
"""

# Regime classification
DISPERSIVE_RATIO = 10.0      # |Delta| / Gamma at or above -> dispersive
ULTRASTRONG_RATIO = 0.1      # |Delta| / Gamma at or below -> ultrastrong
COLLECTIVE_RATIO = 1.0       # N g / omega at or above -> collective
NON_COLLECTIVE_RATIO = 0.1   # N g / omega at or below -> non-collective

# Frequency sampling
SAMPLING_RETRY_CAP = 1000    # redraws per mode

# Spectral decomposition
ORTHOGONALITY_TOL = 1e-10
REORTHOGONALIZE_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10
DEGENERACY_TOL = 1e-9        # relative eigenvalue spread of a degenerate cluster
DECOUPLING_TOL = 1e-12       # relative matrix element below which a mode exchanges nothing

# Moment checks
HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-10
IMAGINARY_RESIDUE_TOL = 1e-10

# Reduced dynamics
CONDITION_MAX = 1e12         # kappa_max for Phi_t inversion

# Quadrature
TOL_QUAD_RELATIVE = 1e-6     # times the dynamic range of dU^md
REFINEMENT_LEVELS = 12

# Analytic oracle
ALPHA_UNDERFLOW = 1e-300
GUARD_BAND = 1e-6            # Gamma^2 cos^2(Omega t / 2) < GUARD_BAND Delta^2 -> singular

# Fock oracle
FOCK_TAIL_WEIGHT = 1e-8
FOCK_DIMENSION_CAP = 10_000
FOCK_MAX_MODES = 3

# Verification thresholds
ORACLE_RTOL = 1e-8
ORACLE_QUAD_RTOL = 1e-6
FOCK_TAIL_FACTOR = 10.0
FOCK_ROUNDOFF_FLOOR = 1e-12   # smallest Fock moment threshold

# Sweep summary
PLATEAU_WINDOW = 0.2         # fraction of the time window at each end
PLATEAU_RATIO = 0.05         # late/early variance ratio flagging a plateau
BALANCE_BAND = (0.2, 0.5)    # expected net balance relative to the exchange
BALANCE_BAND_SLACK = 0.1

# Simulation defaults
DEFAULT_T_MAX = 1000.0       # units of 1/omega1
DEFAULT_N_POINTS = 2001
DEFAULT_WORKERS = 1
DEFAULT_OUTPUT_DIR = "out"
OUTPUT_DIR_ENV = "THERMODUET_OUT"
HISTOGRAM_BINS = 60

# CSV schema
CSV_SCHEMA_VERSION = "1"
APPROACHES = ("wc", "int", "bare", "md")
SUBSYSTEMS = (1, 2)
OUTPUT_GROUPS = (
    "energies",
    "heats",
    "works",
    "balances",
    "effective_hamiltonian_trace",
)
