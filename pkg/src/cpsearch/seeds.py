"""Deterministic seed derivation for workers and per-node sampling streams.

Every random stream is a pure function of (base seed, worker index) or
(base seed, worker index, node), so results never depend on scheduling
order or on how many workers execute concurrently.
"""

from __future__ import annotations

__all__ = ["splitmix64", "worker_search_seed", "node_sampling_seed"]

_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x: int) -> int:
    """One step of the splitmix64 mixer (a standard 64-bit avalanche)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def worker_search_seed(base_seed: int, worker: int) -> int:
    """Seed of worker ``worker``'s search stream.

    Worker 1 uses the base seed unchanged, so a single-worker run is
    bit-identical to a direct search with that seed.
    """
    if worker < 1:
        raise ValueError("worker indices start at 1")
    base = base_seed & _MASK64
    if worker == 1:
        return base
    return base ^ splitmix64(worker)


def node_sampling_seed(base_seed: int, worker: int, node: int) -> int:
    """Seed of the sampling stream for one (worker, node) pair."""
    if worker < 1:
        raise ValueError("worker indices start at 1")
    if node < 0:
        raise ValueError("node indices are non-negative")
    combined = ((worker & 0xFFFFFFFF) << 32) | (node & 0xFFFFFFFF)
    return (base_seed & _MASK64) ^ splitmix64(combined)
