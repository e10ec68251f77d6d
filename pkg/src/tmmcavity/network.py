"""Static scattering network assembled over all element interfaces.

The closed-form field solution in `statics`/`dynamics` only needs the fields
around the mobile scatterer.  The quantum-noise bookkeeping also needs the
response of those fields (and of the two outgoing ports) to vacuum entering
*inside* the chain, at absorptive scatterers.  This module solves the static
chain as one linear system over every interface amplitude, with optional
source injections at scatterers, which covers both uses and doubles as an
independent cross-check of the closed-form solution in the tests.

Unknowns: the amplitude pair v_i = (leftward, rightward) at each of the
N+1 interfaces of an N-element chain.  Equations: v_i = M_i v_{i+1} + s_i
for each element, plus the two pump boundary conditions (rightward input at
the far left, leftward input at the far right).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elements import Chain, Scatterer, element_matrix
from .errors import SingularSolveError

__all__ = ["InterfaceSolution", "solve_network", "scatterer_source"]


def scatterer_source(pol, emit_left: complex, emit_right: complex) -> np.ndarray:
    """Transfer-form inhomogeneity for a scatterer emitting fresh amplitude.

    `emit_left` is added to the outgoing leftward wave on the left face,
    `emit_right` to the outgoing rightward wave on the right face (this is
    how a loss mode's vacuum enters the network).  In transfer form
    v_left = M v_right + s the source vector is
    s = (emit_left - (r/t) emit_right, -emit_right / t).
    """
    r = pol.reflectivity
    t = pol.transmissivity
    return np.array(
        [emit_left - (r / t) * emit_right, -emit_right / t], dtype=complex
    )


@dataclass
class InterfaceSolution:
    """All interface amplitude pairs, index 0 = far left, N = far right."""

    v: np.ndarray  # shape (N+1, 2); columns (leftward, rightward)

    @property
    def out_left(self) -> complex:
        return self.v[0, 0]

    @property
    def out_right(self) -> complex:
        return self.v[-1, 1]

    def left_face(self, element_index: int) -> np.ndarray:
        return self.v[element_index]

    def right_face(self, element_index: int) -> np.ndarray:
        return self.v[element_index + 1]


def solve_network(
    chain: Chain,
    k: float,
    in_left: complex,
    in_right: complex,
    sources: dict[int, np.ndarray] | None = None,
) -> InterfaceSolution:
    """Solve the static chain at wavenumber k with optional element sources.

    `sources` maps element index -> transfer-form source vector (see
    `scatterer_source`).  Raises SingularSolveError if the network has no
    solution (fully blocked transmission channel).
    """
    els = chain.elements
    n = len(els)
    dim = 2 * (n + 1)
    a = np.zeros((dim, dim), dtype=complex)
    rhs = np.zeros(dim, dtype=complex)

    def var(i: int, comp: int) -> int:
        return 2 * i + comp

    row = 0
    for i, el in enumerate(els):
        m = element_matrix(el, k)
        s = None if sources is None else sources.get(i)
        for comp in range(2):
            a[row, var(i, comp)] = 1.0
            a[row, var(i + 1, 0)] = -m[comp, 0]
            a[row, var(i + 1, 1)] = -m[comp, 1]
            if s is not None:
                rhs[row] = s[comp]
            row += 1

    # boundary: rightward amplitude at interface 0 is the left pump;
    # leftward amplitude at interface N is the right pump
    a[row, var(0, 1)] = 1.0
    rhs[row] = in_left
    row += 1
    a[row, var(n, 0)] = 1.0
    rhs[row] = in_right

    try:
        sol = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSolveError(f"chain network is singular at k={k}") from exc
    if not np.all(np.isfinite(sol)):
        raise SingularSolveError(f"chain network solution diverged at k={k}")
    return InterfaceSolution(v=sol.reshape(n + 1, 2))


def absorptive_indices(chain: Chain) -> list[int]:
    """Indices of absorptive scatterers, in chain order."""
    return [
        i
        for i, el in enumerate(chain.elements)
        if isinstance(el, Scatterer) and el.pol.absorptive
    ]
