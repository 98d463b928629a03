"""Parameter grids shared by the acceptance suite, the tests and the CLI."""

STANDARD_N = (1, 5, 10, 50, 100)
STANDARD_MU = (0.0, 0.5, 2.0)
STANDARD_ALPHA = (0.0, 1.0, 5.0)
STANDARD_X = (0.0, 0.1, 0.5, 1.0, 2.0, 5.0)

# Lattice for the generating-function identities.
GF_T = (0.0, 0.1, -0.1, 0.25, -0.25, 0.4, -0.4)
GF_XI = (0.0, 1.0, 2.0, 5.0)
GF_ALPHA = (0.0, 0.5, 1.0, 5.0)
GF_MU = (0.0, 0.5, 1.0, 2.0)

# Convergence sweep endpoints and the domain it runs on.
SWEEP_N = (10, 160)
SWEEP_A, SWEEP_B = 0.0, 2.0

DEFAULT_POINTS = 201
