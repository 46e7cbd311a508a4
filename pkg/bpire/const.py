"""Constants for bpire."""

import math
from logging import Logger, getLogger

_LOGGER: Logger = getLogger(__package__)

TOOL_VERSION = "0.1.0"

# model file keys
CONF_ATOMS = "atoms"
CONF_PROB = "prob"
CONF_OFFSPRING = "offspring"
CONF_IMMIGRATION = "immigration"
CONF_KIND = "kind"
CONF_PARAM = "param"
CONF_SITES = "sites"
CONF_VALUE = "value"
CONF_REFLECT = "reflect_at_origin"

# law kinds
KIND_GEOMETRIC = "geometric"
KIND_POISSON = "poisson"
KIND_DETERMINISTIC = "deterministic"
KIND_FINITE = "finite"

# presets
PRESET_ENV_A = "ENV-A"
PRESET_ENV_B = "ENV-B"
PRESET_ENV_C = "ENV-C"
PRESET_ENV_D = "ENV-D"
PRESET_ENV_E = "ENV-E"
PRESET_SITES_A = "SITES-A"
PRESET_SITES_B = "SITES-B"
PRESET_SITES_C = "SITES-C"
PRESET_KAPPAS = {
    PRESET_ENV_A: 2.0,
    PRESET_ENV_B: 1.0,
    PRESET_ENV_C: 0.5,
    PRESET_ENV_D: 3.0,
    PRESET_ENV_E: 1.5,
}
SITE_PRESET_KAPPAS = {
    PRESET_SITES_A: 2.0,
    PRESET_SITES_B: 1.0,
    PRESET_SITES_C: 0.5,
}

# tolerances
PROB_SUM_TOL = 1e-12
TILT_TOL = 1e-9
KAPPA_TOL = 1e-10
LATTICE_TOL = 1e-9
KAPPA_BRACKET_MAX = 64.0
KAPPA_TWO_EXCLUSION = 0.02
KAPPA_ONE_TOL = 1e-6

# simulation limits
STATE_LIMIT = 2**62  # states at or above this could wrap int64 on the next draw
FINITE_PROGENY_CAP = 10**7
DEFAULT_STEP_BUDGET = 10**9
DEFAULT_TARGET_BIAS = 1e-6
BURNIN_BIAS_WARN = 1e-6

# task sizes; fixed so results never depend on the worker count
CHAINS_PER_TASK = 8192
STRETCHES_PER_TASK = 2048
THETA_REPS_PER_TASK = 16384
CLUSTER_REPS_PER_TASK = 8192
WALKS_PER_TASK = 512
COUPLED_WALKS_PER_TASK = 256
LCHAINS_PER_TASK = 8192
PATHS_PER_TASK = 16

# task kinds for seed derivation
TASK_STATIONARY = 1
TASK_PATHS = 2
TASK_STRETCH = 3
TASK_THETA = 4
TASK_CLUSTER = 5
TASK_WALK = 6
TASK_LCHAIN = 7
TASK_GOLDIE = 8
TASK_RESIDUAL = 9
TASK_WALK_COUPLED = 10
TASK_WALK_TIME = 11

# estimator defaults
DEFAULT_THRESHOLD_QUANTILE = 0.999
MIN_SPECTRAL_EXCEEDANCES = 500
MIN_PLATEAU_EXCEEDANCES = 100
MIN_BLOCK_EXCEEDANCES = 100
MIN_ANTICLUSTER_EXCEEDANCES = 100
DEFAULT_THETA_HORIZON = 200
ECF_WINDOW = (0.2, 0.9)
ECF_GRID_POINTS = 400
MIN_ECF_POINTS = 5
MIN_STABLE_SUMS = 1000
MIN_FRECHET_REPS = 1000
CLUSTER_TAIL_RATIO = 1e-3
CLUSTER_TAIL_FRACTION = 0.01
KS_CRITICAL_1PCT = 1.628
MAX_CENSORED_FRACTION = 1e-3

# exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_ACCEPTANCE = 4

ENV_SEED = "BPIRE_SEED"
DEFAULT_SEED = 20241118

GOLDIE_C_KAPPA_ONE = 3.0 / math.log(2.0)  # ENV-B closed form

# budgets scale reps and lengths of the acceptance suite
BUDGET_QUICK = "quick"
BUDGET_FULL = "full"
BUDGETS = {
    BUDGET_QUICK: {
        "count": 200_000,
        "hill_k": 2_000,
        "theta_reps": 200_000,
        "path_count": 20,
        "path_length": 50_000,
        "block_length": 1_000,
        "n": 1_000,
        "reps": 2_000,
        "walk_n": 100,
        "walk_reps": 2_000,
    },
    BUDGET_FULL: {
        "count": 1_000_000,
        "hill_k": 10_000,
        "theta_reps": 1_000_000,
        "path_count": 100,
        "path_length": 100_000,
        "block_length": 1_000,
        "n": 10_000,
        "reps": 10_000,
        "walk_n": 10_000,
        "walk_reps": 10_000,
    },
}
