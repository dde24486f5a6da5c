"""Central table of numerical tolerances."""

# matrix identities: hermiticity of builders, involutions, commutators
EXACT = 1e-12
# unitary identities: U^dag U = I, group law, spectra on the unit circle
UNITARY = 1e-10
# trajectory comparisons (amplitudes, closed forms)
TRAJECTORY = 1e-9
# state norm right after construction
NORM = 1e-12
# accumulated norm drift allowed during propagation before raising
NORM_DRIFT = 1e-10
# |{Pi, H}| threshold for the time-reversal precondition
ANTICOMMUTATION = 1e-10
# parity-eigenstate precondition of the NOT gate
PARITY_EIGEN = 1e-10
# relative energy drift under a constant Hamiltonian
ENERGY_DRIFT = 1e-9
