"""Runtime switches read from the environment."""

import os


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


#: Set LATRED_DISABLE_NUMBA=1 to run the plain numpy/Python kernels.
USE_NUMBA = not _flag("LATRED_DISABLE_NUMBA")

#: Upper bound on the number of cubes any single complex may have.
MAX_CELLS = int(os.environ.get("LATRED_MAX_CELLS", "20000000"))

#: Largest corner coordinate the rectangle searches will try.
MAX_CORNER = int(os.environ.get("LATRED_MAX_CORNER", "512"))
