"""Numerical tolerances used across the library.

Structural invariants (hermiticity, unitarity, row sums) are checked in
max-norm at 1e-10 unless a tighter/looser bound is natural; everything here
assumes IEEE-754 doubles and leaves headroom above LAPACK round-off.
"""

# Matrix structure
HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-10
IDEMPOTENCE_TOL = 1e-10
TRACE_ONE_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-10

# Probability matrices
ENTRY_RANGE_TOL = 1e-12
ROW_SUM_TOL = 1e-10

# Singular value decomposition contracts
SVD_RECONSTRUCTION_TOL = 1e-9
TRACE_R2_TOL = 1e-9
FRAME_NORMALIZATION_TOL = 1e-8

# Certification defaults
CERTIFY_TOL = 1e-9
REFUTE_THRESHOLD = 1e-6
CHAIN_TOL = 1e-12

# Simulation
PROBABILITY_DUST = 1e-12
ROW_RENORM_LIMIT = 1e-9
