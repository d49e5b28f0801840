"""Error-correction workbench: classical codes, qubit codes, bosonic and GKP codes, toric code, Wigner functions."""

__version__ = "0.1.0"

from . import bosonic, classical, core, gkp, qubit_codes, toric, wigner  # noqa: E402,F401
