"""Synthetic repetitive corpora and FASTA ingestion."""

from __future__ import annotations

import numpy as np

FASTA_SEPARATOR = 0x03


def mutated_copies(
    seed_len: int,
    copies: int,
    rate: float = 0.001,
    alphabet: bytes = b"ACGT",
    seed: int = 0,
) -> bytes:
    """``copies`` copies of a random seed string, each with point substitutions.

    Every position of every copy is substituted with probability ``rate`` by a
    different symbol of ``alphabet``.
    """
    rng = np.random.default_rng(seed)
    alpha = np.frombuffer(alphabet, dtype=np.uint8)
    k = len(alpha)
    base = rng.integers(0, k, size=seed_len, dtype=np.int64)
    out = np.empty(seed_len * copies, dtype=np.uint8)
    for c in range(copies):
        cur = base.copy()
        hits = np.flatnonzero(rng.random(seed_len) < rate)
        if k > 1 and len(hits):
            cur[hits] = (cur[hits] + rng.integers(1, k, size=len(hits))) % k
        out[c * seed_len : (c + 1) * seed_len] = alpha[cur]
    return out.tobytes()


def read_fasta(data: bytes, separator: int = FASTA_SEPARATOR) -> bytes:
    """Concatenate FASTA records, dropping headers and line breaks.

    Records are joined with ``separator`` (a byte above the reserved range).
    """
    records: list[bytes] = []
    current: list[bytes] = []
    started = False
    for line in data.splitlines():
        if line.startswith(b">"):
            if started:
                records.append(b"".join(current))
            current = []
            started = True
            continue
        line = line.strip()
        if line:
            current.append(line)
            started = True
    if started:
        records.append(b"".join(current))
    return bytes([separator]).join(records)
