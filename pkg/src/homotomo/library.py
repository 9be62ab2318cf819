"""Named test states used by the verification suites and acceptance tests.

Truncations are the smallest ``N >= 16`` meeting the trace-deficit limit.
"""

from __future__ import annotations

from .fock import DensityMatrix, StateDescriptor, make_state

__all__ = ["LIBRARY", "library_state"]

LIBRARY: dict[str, StateDescriptor] = {
    **{f"fock{n}": StateDescriptor("fock", 16, n=n) for n in range(6)},
    "coherent1": StateDescriptor.coherent(1.0, 16),
    "coherent1+1j": StateDescriptor.coherent(1 + 1j, 16),
    "coherent2": StateDescriptor.coherent(2.0, 18),
    "cat2": StateDescriptor.cat(2.0, 16),
    "thermal1": StateDescriptor.thermal(1.0, 20),
}

_cache: dict[str, DensityMatrix] = {}


def library_state(name: str) -> DensityMatrix:
    if name not in _cache:
        _cache[name] = make_state(LIBRARY[name])
    return _cache[name]
