"""Random gate generation under the invariant measure.

Two independent routes are provided.  The coordinate sampler draws the
fifteen chart coordinates from their exact marginals (inverse-CDF for
the rotation angles, rejection against the chamber density for the
commuting core) and assembles the matrix.  The matrix oracle draws a
complex Ginibre matrix and orthonormalises it, which is Haar by
construction and owes nothing to the formulas under test — the
distribution checks play the two against each other.

Streams are split into fixed-size blocks, each seeded from its own
``SeedSequence`` spawn key, so results are bit-identical for a given
seed no matter how many workers run the blocks.
"""
from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .gates import _assemble_batch, matrix_to_json_dict
from .geometry import WEYL_DENSITY_MAX, weyl_density
from .invariants import _canonical_coords_batch, _makhlin_batch, g_from_c
from .volumes import is_perfect_entangler

#: Samples per deterministic stream block.
BLOCK_SIZE = 1 << 14

#: Chamber rejection acceptance rate, for sizing proposal rounds.
_ACCEPT_RATE = 2.0 / np.pi**2


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    worker_count: int = 1
    method: str = "matrix_oracle"  # or "coordinate_density"

    def __post_init__(self):
        if self.method not in ("matrix_oracle", "coordinate_density"):
            raise ValidationError(
                f"unknown sampling method {self.method!r}; "
                "use matrix_oracle or coordinate_density"
            )
        if self.worker_count < 1:
            raise ValidationError("worker_count must be at least 1")


def _block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def _alpha_from_uniform(u: np.ndarray) -> np.ndarray:
    """Invert the rotation-angle CDF (alpha - sin alpha) / (4 pi).

    Safeguarded Newton: steps that leave the current bracket fall back to
    bisection, so the flat CDF spots at multiples of 2 pi cannot trap it.
    """
    u = np.asarray(u, dtype=float)
    lo = np.zeros_like(u)
    hi = np.full_like(u, 4.0 * np.pi)
    x = 4.0 * np.pi * u  # exact for the linear part of the CDF
    target = 4.0 * np.pi * u
    for _ in range(64):
        f = x - np.sin(x) - target
        lo = np.where(f < 0, x, lo)
        hi = np.where(f > 0, x, hi)
        df = 1.0 - np.cos(x)
        step = np.divide(f, df, out=np.zeros_like(f), where=df > 1e-12)
        cand = x - step
        bad = (cand <= lo) | (cand >= hi) | (df <= 1e-12)
        x = np.where(bad, 0.5 * (lo + hi), cand)
        if np.abs(f).max(initial=0.0) < 1e-12 and np.abs(hi - lo).max() < 1e-12:
            break
    return x


def _su2_block(rng: np.random.Generator, m: int) -> np.ndarray:
    """One factor's (alpha, theta, phi) triples, shape (m, 3)."""
    u = rng.random((m, 3))
    out = np.empty((m, 3))
    out[:, 0] = _alpha_from_uniform(u[:, 0])
    out[:, 1] = np.arccos(1.0 - 2.0 * u[:, 1])
    out[:, 2] = 2.0 * np.pi * u[:, 2]
    return out


def _chamber_block(rng: np.random.Generator, m: int) -> np.ndarray:
    """Chamber coordinates with the exact density, shape (m, 3).

    Proposals are uniform on the chamber: descending-sorted uniforms fill
    the half-cell with c1 <= pi/2, and a fair coin reflects c1 across
    pi/2 (the density is symmetric under that reflection).  Acceptance is
    the density over its known maximum.
    """
    out = np.empty((m, 3))
    have = 0
    while have < m:
        want = m - have
        batch = max(256, int(want / _ACCEPT_RATE * 1.15))
        u = rng.random((batch, 5))
        c = np.sort(u[:, :3], axis=1)[:, ::-1] * (np.pi / 2)
        flip = u[:, 3] < 0.5
        c[flip, 0] = np.pi - c[flip, 0]
        keep = u[:, 4] * WEYL_DENSITY_MAX < weyl_density(c)
        accepted = c[keep]
        take = min(want, accepted.shape[0])
        out[have : have + take] = accepted[:take]
        have += take
    return out


def _full_block(rng: np.random.Generator, m: int) -> np.ndarray:
    """All fifteen coordinates: chamber triple then four rotation triples."""
    out = np.empty((m, 15))
    out[:, 12:15] = _chamber_block(rng, m)
    for slot in range(4):
        out[:, 3 * slot : 3 * slot + 3] = _su2_block(rng, m)
    return out


def _matrix_block(rng: np.random.Generator, m: int) -> np.ndarray:
    """Haar unitaries from Ginibre + QR, det-projected, shape (m, 4, 4)."""
    z = rng.standard_normal((m, 4, 4)) + 1j * rng.standard_normal((m, 4, 4))
    q, r = np.linalg.qr(z)
    diag = np.einsum("nii->ni", r)
    q = q * (diag / np.abs(diag))[:, None, :]
    det = np.linalg.det(q)
    return q * np.exp(-1j * np.angle(det) / 4.0)[:, None, None]


def _run_blocks(n: int, config: SamplerConfig, block_fn) -> np.ndarray:
    if n <= 0:
        raise ValidationError("sample count must be positive")
    spans = [
        (b, min(BLOCK_SIZE, n - b * BLOCK_SIZE))
        for b in range((n + BLOCK_SIZE - 1) // BLOCK_SIZE)
    ]

    def work(span):
        block, take = span
        return block_fn(_block_rng(config.seed, block), take)

    if config.worker_count == 1 or len(spans) == 1:
        parts = [work(s) for s in spans]
    else:
        with ThreadPoolExecutor(max_workers=config.worker_count) as pool:
            parts = list(pool.map(work, spans))
    return np.concatenate(parts, axis=0)


def sample_canonical(n: int, config: SamplerConfig = SamplerConfig()) -> np.ndarray:
    """Chamber coordinates of ``n`` random gates, shape (n, 3)."""
    if config.method == "coordinate_density":
        return _run_blocks(n, config, _chamber_block)
    return _canonical_coords_batch(_run_blocks(n, config, _matrix_block))


def sample_gates(n: int, config: SamplerConfig = SamplerConfig()) -> np.ndarray:
    """Random gate matrices, shape (n, 4, 4)."""
    if config.method == "coordinate_density":
        return _assemble_batch(_run_blocks(n, config, _full_block))
    return _run_blocks(n, config, _matrix_block)


def sample_full_coords(n: int, config: SamplerConfig = SamplerConfig()) -> np.ndarray:
    """All fifteen chart coordinates, shape (n, 15).

    Only the coordinate sampler can produce these (the matrix oracle has
    no preferred chart point), so the configured method is ignored.
    """
    return _run_blocks(n, config, _full_block)


def sample_invariants(n: int, config: SamplerConfig = SamplerConfig()) -> np.ndarray:
    """Invariant triples (g1, g2, g3) of random gates, shape (n, 3)."""
    if config.method == "coordinate_density":
        return g_from_c(_run_blocks(n, config, _chamber_block))
    return _makhlin_batch(_run_blocks(n, config, _matrix_block))


def summarize_samples(coords: np.ndarray) -> dict:
    """Quick summary statistics of sampled chamber coordinates."""
    coords = np.asarray(coords, dtype=float)
    g = g_from_c(coords)
    pe = is_perfect_entangler(coords)
    n = coords.shape[0]
    return {
        "count": int(n),
        "pe_fraction": float(np.count_nonzero(pe)) / n,
        "mean_c": [float(v) for v in coords.mean(axis=0)],
        "mean_g": [float(v) for v in g.mean(axis=0)],
    }


def _sink(path_or_file, newline=None):
    if hasattr(path_or_file, "write"):
        return nullcontext(path_or_file)
    return open(path_or_file, "w", newline=newline, encoding="utf-8")


def export_csv(path, coords: np.ndarray) -> None:
    """Write samples as CSV rows ``c1,c2,c3,g1,g2,g3,is_pe``.

    ``path`` may also be an open text stream.  Floats use their shortest
    round-trip representation; the perfect-entangler flag is 1 or 0.
    """
    coords = np.asarray(coords, dtype=float)
    g = g_from_c(coords)
    pe = is_perfect_entangler(coords)
    with _sink(path, newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["c1", "c2", "c3", "g1", "g2", "g3", "is_pe"])
        for i in range(coords.shape[0]):
            writer.writerow(
                [repr(float(v)) for v in (*coords[i], *g[i])] + [int(pe[i])]
            )


def export_jsonl(path, gates: np.ndarray, include_invariants: bool = True) -> None:
    """Write gate matrices as JSON lines.

    ``path`` may also be an open text stream.  Each line carries the
    matrix in the ``[[re, im], ...]`` grid format; with
    ``include_invariants`` the canonical coordinates and invariant
    triple are attached as well.
    """
    gates = np.asarray(gates, dtype=complex)
    if gates.ndim != 3 or gates.shape[1:] != (4, 4):
        raise ValidationError("expected a stack of 4x4 matrices")
    if include_invariants:
        g = _makhlin_batch(gates)
        c = _canonical_coords_batch(gates)
        pe = is_perfect_entangler(c)
    with _sink(path) as fh:
        for i in range(gates.shape[0]):
            record = matrix_to_json_dict(gates[i])
            if include_invariants:
                record["c"] = [float(v) for v in c[i]]
                record["g"] = [float(v) for v in g[i]]
                record["is_pe"] = bool(pe[i])
            fh.write(json.dumps(record) + "\n")
