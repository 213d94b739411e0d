"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""
from __future__ import annotations

import warnings

import numpy as np

from .exceptions import CapExceededError, InvalidStateError

NORM_ATOL = 1e-10


def check_state(state, normalized: bool = True, atol: float = NORM_ATOL) -> np.ndarray:
    """Coerce ``state`` to a 1-D float64 array whose length is a power of two.

    Complex input is accepted only when its imaginary part is exactly zero;
    every operator in the algorithm is real.
    """
    x = np.asarray(state)
    if np.iscomplexobj(x):
        if np.any(x.imag != 0):
            raise InvalidStateError("amplitudes must be real")
        x = x.real
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidStateError(f"state must be 1-D, got shape {x.shape}")
    size = x.size
    if size == 0 or size & (size - 1):
        raise InvalidStateError(f"state length {size} is not a power of two")
    if normalized:
        check_norm(float(x @ x), atol)
    return x


def check_norm(norm_sq: float, atol: float = NORM_ATOL) -> None:
    if not abs(norm_sq - 1.0) < atol:
        raise InvalidStateError(f"squared norm {norm_sq!r} deviates from 1 by more than {atol}")


def check_lattice_size(n: int, max_n: int) -> None:
    """Refuse full-lattice work above ``max_n``; warn about memory above 24."""
    if n > max_n:
        raise CapExceededError(
            f"n={n} exceeds the full-simulation cap {max_n}; raise max_n to override"
        )
    if n > 24:
        mib = (8 << n) >> 20
        warnings.warn(f"n={n}: state vector alone needs {mib} MiB", ResourceWarning, stacklevel=2)


def check_problem(X):
    """Accept a ProblemInstance, a problem dict, or a path to a problem file."""
    from .oracle import ProblemInstance, load_problem

    if isinstance(X, ProblemInstance):
        return X
    if isinstance(X, dict):
        return ProblemInstance.from_dict(X)
    if isinstance(X, (str, bytes)) or hasattr(X, "__fspath__"):
        return load_problem(X)
    raise TypeError(f"expected a ProblemInstance, dict or path, got {type(X).__name__}")
