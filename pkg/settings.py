# NUMERIC TOLERANCES
RANK_TOL = 1e-8  # relative eigenvalue threshold for kernel membership
OPT_TOL = 1e-7  # oracle residual threshold, relative to 1 + sum of squared data
NEAR_TOL_FACTOR = 10.0  # eigenvalues this close to the threshold are flagged non-generic
SYMMETRY_RTOL = 1e-12

# EXACT SEARCH LIMITS
MIS_LIMIT = 24
BIPARTITE_LIMIT = 16
ORACLE_MAX_N = 10

# ORACLE
RESTARTS = 20
MAX_ITER = 2000

# SAMPLING
SEED = 42
SAMPLES = 300
THRESHOLD = 0.02
RESAMPLE_ATTEMPTS = 5
THREADS = 1
WORKER_POLL = 0.5  # seconds between liveness checks while waiting on sampling processes

# LOGGING
LOG_LEVEL = "INFO"
LOG_FILE = "logfile.txt"  # None disables the file handler
