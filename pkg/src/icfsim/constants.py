"""Package-wide defaults."""

# Default RNG seed used by every stochastic entry point when none is given,
# so repeated runs are reproducible out of the box.
DEFAULT_SEED = 12345
