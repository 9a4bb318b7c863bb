"""Pure-dephasing open-system dynamics toolkit.

Microscopically distinct system-environment models with identical reduced
dynamics, trace-distance information flow and its environment/correlation
decomposition, and entanglement/discord analysis of the joint states.

Importing the package brings in every submodule, so both
``from dephaselab import dephasing`` and ``dephaselab.dephasing`` work
directly; ``KERNEL_BACKEND`` names the eigensolver backend selected at
import time.
"""

__version__ = "0.1.0"

from dephaselab._kernels import BACKEND as KERNEL_BACKEND

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    "correlate",
    "dephasing",
    "equivalence",
    "errors",
    "infoflow",
    "matrixcore",
    "qstate",
    "workbench",
]

from dephaselab import (  # noqa: E402
    correlate,
    dephasing,
    equivalence,
    errors,
    infoflow,
    matrixcore,
    qstate,
    workbench,
)
