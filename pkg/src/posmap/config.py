"""
Posmap configuration - numerical defaults shared by every module

All tolerances are absolute on eigenvalues unless a function says otherwise,
and every public function takes its tolerance as an overridable keyword.
"""

# Hermiticity / PSD / contraction tolerance
DEFAULT_TOL = 1e-9

# Haar samples drawn by the positivity falsifier
DEFAULT_SAMPLES = 10_000

DEFAULT_SEED = 0

# Sampled vectors used by the quick CP-if-positive filter
FILTER_SAMPLES = 64

# A local-coefficient verdict and its PSD cross-check only count as disagreeing
# when each clears its own threshold by this multiple of the tolerance
DISAGREEMENT_SLACK = 1e3

# Canonical float formatting of matrix documents (17 significant digits)
FLOAT_FORMAT = ".17g"

# Default logging format for the command-line entry point
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
