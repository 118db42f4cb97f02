"""Status codes returned by the integration and factorization kernels."""
OK = 0
SINGULAR = 1
STEP_UNDERFLOW = 2
NEWTON_DIVERGENCE = 3
