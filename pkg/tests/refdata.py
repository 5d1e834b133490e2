"""Published reference values the fixtures and tests are checked against."""

# Energy-delay product (kJ s) per (app, platform, compiler) for the shipped
# single-node energy fixture. Recomputed EDP must match within 0.5% (the
# published time and E2S inputs are rounded).
EXPECTED_EDP_KJS = {
    ("alya", "dibona-tx2", "gnu"): 31325.1,
    ("alya", "dibona-tx2", "arm"): 14198.5,
    ("alya", "dibona-x86", "gnu"): 23877.5,
    ("alya", "dibona-x86", "intel"): 10507.9,
    ("lbc", "dibona-tx2", "gnu"): 20681.5,
    ("lbc", "dibona-tx2", "arm"): 35767.4,
    ("lbc", "dibona-x86", "gnu"): 19683.5,
    ("lbc", "dibona-x86", "intel"): 20413.2,
    ("tangaroa", "dibona-tx2", "gnu"): 2769.76,
    ("tangaroa", "dibona-tx2", "arm"): 2360.19,
    ("tangaroa", "dibona-x86", "gnu"): 1383.72,
    ("tangaroa", "dibona-x86", "intel"): 1694.62,
    ("graph500-pow2", "dibona-tx2", "gnu"): 477.98,
    ("graph500-pow2", "dibona-tx2", "arm"): 421.37,
    ("graph500-pow2", "dibona-x86", "gnu"): 951.48,
    ("graph500-pow2", "dibona-x86", "intel"): 776.30,
    ("graph500-generic", "dibona-tx2", "gnu"): 857.80,
    ("graph500-generic", "dibona-tx2", "arm"): 786.60,
    ("graph500-generic", "dibona-x86", "gnu"): 1045.85,
    ("graph500-generic", "dibona-x86", "intel"): 926.76,
}

# Lattice-update energy efficiency (MLUP/J) for the LBC rows, +-0.01.
EXPECTED_MLUP_PER_J = {
    ("lbc", "dibona-tx2", "gnu"): 0.82,
    ("lbc", "dibona-tx2", "arm"): 0.63,
    ("lbc", "dibona-x86", "gnu"): 0.61,
    ("lbc", "dibona-x86", "intel"): 0.60,
}

# Strong-scaling (a, b) parameter rows used as generators for fit-recovery
# checks; mirrors fixtures/scaling_projection_params.csv.
AMDAHL_PARAM_ROWS = [
    ("alya/dibona-tx2/gnu", 0.960, -0.685),
    ("alya/dibona-tx2/arm", 0.947, -0.890),
    ("alya/marenostrum4/gnu", 0.892, -0.634),
    ("alya/marenostrum4/intel", 0.954, -0.674),
    ("tangaroa/dibona-tx2/gnu", 0.989, 0.162),
    ("tangaroa/marenostrum4/gnu", 0.946, -0.324),
    ("graph500/dibona-tx2/gnu", 0.918, -0.554),
    ("graph500/dibona-tx2/arm", 0.905, -0.604),
    ("graph500/marenostrum4/gnu", 0.968, -1.252),
    ("graph500/marenostrum4/intel", 0.970, -0.950),
]

# Weak-scaling parallel fractions.
GUSTAFSON_PARAM_ROWS = [
    ("lbc/dibona-tx2/gnu", 0.817),
    ("lbc/marenostrum4/gnu", 0.839),
]

# MPI-time share model parameters (percent): lb = a*p + b, com = c.
MPI_SHARE_PARAMS = {
    "dibona-tx2": (1.26, 3.86, 19.59),
    "marenostrum4": (0.31, 3.29, 26.77),
}

# Phase intensities (Flop/Byte) of the finite-element respiratory simulation;
# all memory-bound on an eight-channel node.
ALYA_PHASE_INTENSITIES = {
    "matrix-assembly": 0.09,
    "solver1": 0.03,
    "solver2": 0.12,
    "subgrid-scale": 0.07,
    "particles": 0.05,
}
