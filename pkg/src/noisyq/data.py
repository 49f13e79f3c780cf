"""Sequence ingestion and the classical preprocessing pipeline.

CSV in (`id,sequence,label`), then k-mer frequency vectors, PCA down to the
qubit count, min-max scaling into the encoding range [0, pi], and a
stratified split.  Every fitted statistic (PCA mean/components, scale
bounds) comes from the training split alone.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass

import numpy as np

from noisyq.classifiers.base import LabeledDataset

ALPHABET = "ACGT"
DEFAULT_K = 3
DEFAULT_DIMS = 4
DEFAULT_TEST_FRACTION = 0.2


@dataclass(frozen=True)
class SequenceRecord:
    id: str
    sequence: str
    label: int

    def __post_init__(self):
        if not self.sequence:
            raise ValueError("empty sequence")
        if any(c not in "ACGTN" for c in self.sequence):
            raise ValueError("sequence characters must be A/C/G/T/N")
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")


def _parse_label(text: str) -> int:
    if text.strip() not in ("0", "1"):
        raise ValueError(f"unknown label value {text.strip()!r}")
    return int(text.strip())


def _load_csv(path) -> tuple:
    records, rejected = [], []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = [c.strip() for c in lines[0].split(",")]
    if header != ["id", "sequence", "label"]:
        raise ValueError(f"{path}: expected header id,sequence,label, got {lines[0]!r}")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            if len(parts) != 3:
                raise ValueError(f"expected 3 columns, got {len(parts)}")
            rec = SequenceRecord(
                id=parts[0].strip(),
                sequence=parts[1].strip().upper(),
                label=_parse_label(parts[2]),
            )
        except ValueError as exc:
            rejected.append((lineno, str(exc)))
            continue
        records.append(rec)
    return records, rejected


def _load_fasta(path) -> tuple:
    """FASTA plus a `<name>.labels.csv` sidecar mapping id to label."""
    import os

    base, _ = os.path.splitext(str(path))
    sidecar = base + ".labels.csv"
    labels = {}
    with open(sidecar, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or [c.strip() for c in lines[0].split(",")] != ["id", "label"]:
        raise ValueError(f"{sidecar}: expected header id,label")
    rejected = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            if len(parts) != 2:
                raise ValueError("expected 2 columns")
            labels[parts[0].strip()] = _parse_label(parts[1])
        except ValueError as exc:
            rejected.append((lineno, f"{sidecar}: {exc}"))
    records = []
    name, chunks, start_line = None, [], 0
    with open(path, "r", encoding="utf-8") as fh:
        fasta_lines = fh.read().splitlines()
    entries = []
    for lineno, line in enumerate(fasta_lines, start=1):
        if line.startswith(">"):
            if name is not None:
                entries.append((name, "".join(chunks), start_line))
            name, chunks, start_line = line[1:].split()[0], [], lineno
        elif line.strip():
            chunks.append(line.strip().upper())
    if name is not None:
        entries.append((name, "".join(chunks), start_line))
    for name, seq, lineno in entries:
        try:
            if name not in labels:
                raise ValueError(f"no label for id {name!r}")
            records.append(SequenceRecord(id=name, sequence=seq, label=labels[name]))
        except ValueError as exc:
            rejected.append((lineno, str(exc)))
    return records, rejected


def load_sequences(path, fmt: str = "csv") -> list:
    """Parse labeled sequences; malformed rows are skipped with a warning
    naming their line numbers, and an input yielding zero valid records is
    an error."""
    if fmt == "csv":
        records, rejected = _load_csv(path)
    elif fmt == "fasta":
        records, rejected = _load_fasta(path)
    else:
        raise ValueError(f"unknown format {fmt!r} (expected csv or fasta)")
    for lineno, reason in rejected:
        warnings.warn(f"{path}:{lineno}: rejected row ({reason})", stacklevel=2)
    if not records:
        raise ValueError(f"{path}: no valid records")
    return records


def kmer_index(kmer: str) -> int:
    idx = 0
    for c in kmer:
        idx = idx * 4 + ALPHABET.index(c)
    return idx


def vectorize_kmer(records, k: int = DEFAULT_K) -> np.ndarray:
    """Frequency of each length-k substring, columns in lexicographic order.

    Windows containing 'N' are skipped and the denominator counts only the
    valid windows, so frequencies still sum to 1 whenever any window is
    valid.
    """
    if not 1 <= k <= 4:
        raise ValueError(f"k must be in [1, 4], got {k}")
    out = np.zeros((len(records), 4**k))
    for row, rec in enumerate(records):
        seq = rec.sequence
        if len(seq) < k:
            raise ValueError(f"sequence {rec.id!r} shorter than k={k}")
        valid = 0
        for start in range(len(seq) - k + 1):
            window = seq[start : start + k]
            if "N" in window:
                continue
            out[row, kmer_index(window)] += 1
            valid += 1
        if valid:
            out[row] /= valid
    return out


@dataclass(frozen=True)
class PcaModel:
    """Training-split projection: center by mean, project onto components."""

    mean: np.ndarray
    components: np.ndarray  # (d_in, dims)
    explained_variance_shares: np.ndarray
    effective_rank: int

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) @ self.components

    def to_doc(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance_shares": self.explained_variance_shares.tolist(),
            "effective_rank": self.effective_rank,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PcaModel":
        return cls(
            mean=np.asarray(doc["mean"], dtype=float),
            components=np.asarray(doc["components"], dtype=float),
            explained_variance_shares=np.asarray(doc["explained_variance_shares"], dtype=float),
            effective_rank=int(doc["effective_rank"]),
        )


def pca_fit_transform(train: np.ndarray, test: np.ndarray, dims: int = DEFAULT_DIMS):
    """Fit on the training matrix only; project both splits.

    Components are right singular vectors of the centered training matrix
    with a sign convention (largest-magnitude entry positive) so repeated
    fits are bit-reproducible.  Rank below dims pads zero components and
    warns.
    """
    train = np.atleast_2d(np.asarray(train, dtype=float))
    test = np.atleast_2d(np.asarray(test, dtype=float))
    if train.shape[0] < dims:
        raise ValueError(f"need at least {dims} training rows, got {train.shape[0]}")
    if np.isnan(train).any() or np.isnan(test).any():
        raise ValueError("NaN in input")
    mean = train.mean(axis=0)
    centered = train - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    # rank cutoff scaled like numpy's matrix_rank default
    cutoff = svals.max(initial=0.0) * max(train.shape) * np.finfo(float).eps
    rank = int(np.sum(svals > cutoff))
    eff = min(rank, dims)
    if eff < dims:
        warnings.warn(f"training matrix rank {rank} < dims {dims}; padding zero components", stacklevel=2)
    comps = np.zeros((train.shape[1], dims))
    for j in range(eff):
        v = vt[j]
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        comps[:, j] = v
    total = float((svals**2).sum())
    shares = np.zeros(dims)
    if total > 0:
        shares[:eff] = (svals[:eff] ** 2) / total
    model = PcaModel(
        mean=mean, components=comps, explained_variance_shares=shares, effective_rank=eff
    )
    return model, model.transform(train), model.transform(test)


@dataclass(frozen=True)
class ScaleModel:
    """Per-column min-max bounds fitted on the training split."""

    mins: np.ndarray
    maxs: np.ndarray

    def transform(self, X: np.ndarray, clip: bool = True) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        span = self.maxs - self.mins
        out = np.empty_like(X)
        for j in range(X.shape[1]):
            if span[j] <= 0:
                out[:, j] = math.pi / 2
            else:
                out[:, j] = (X[:, j] - self.mins[j]) / span[j] * math.pi
        if clip:
            out = np.clip(out, 0.0, math.pi)
        return out

    def to_doc(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_doc(cls, doc: dict) -> "ScaleModel":
        return cls(
            mins=np.asarray(doc["mins"], dtype=float),
            maxs=np.asarray(doc["maxs"], dtype=float),
        )


def scale_to_encoding_range(train: np.ndarray, test: np.ndarray):
    """Map training columns onto [0, pi]; clip test into range.

    A constant training column carries no information and maps to the
    midpoint pi/2 (warned).
    """
    train = np.atleast_2d(np.asarray(train, dtype=float))
    test = np.atleast_2d(np.asarray(test, dtype=float))
    if not (np.all(np.isfinite(train)) and np.all(np.isfinite(test))):
        raise ValueError("inputs must be finite")
    mins, maxs = train.min(axis=0), train.max(axis=0)
    constant = np.flatnonzero(maxs - mins <= 0)
    if constant.size:
        warnings.warn(f"constant training column(s) {constant.tolist()} map to pi/2", stacklevel=2)
    model = ScaleModel(mins=mins, maxs=maxs)
    return model, model.transform(train, clip=False), model.transform(test, clip=True)


def stratified_split(y: np.ndarray, test_fraction: float = DEFAULT_TEST_FRACTION, seed: int = 0):
    """Index split keeping per-class proportions, deterministic per seed."""
    y = np.asarray(y, dtype=int).reshape(-1)
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = np.random.Generator(np.random.PCG64(seed))
    train_idx, test_idx = [], []
    for cls in sorted(np.unique(y)):
        members = np.flatnonzero(y == cls)
        perm = members[rng.permutation(members.size)]
        n_test = int(members.size * test_fraction + 0.5)
        test_idx.extend(perm[:n_test])
        train_idx.extend(perm[n_test:])
    return np.array(sorted(train_idx)), np.array(sorted(test_idx))


def prepare_from_records(
    records,
    *,
    k: int = DEFAULT_K,
    dims: int = DEFAULT_DIMS,
    test_fraction: float = DEFAULT_TEST_FRACTION,
    split_seed: int = 0,
):
    """Full pipeline: k-mers, split, PCA, scaling. Returns train/test sets
    plus the fitted models."""
    X = vectorize_kmer(records, k)
    y = np.array([r.label for r in records], dtype=int)
    train_idx, test_idx = stratified_split(y, test_fraction, split_seed)
    pca, train_p, test_p = pca_fit_transform(X[train_idx], X[test_idx], dims)
    scale, train_s, test_s = scale_to_encoding_range(train_p, test_p)
    train = LabeledDataset(train_s, y[train_idx])
    test = LabeledDataset(test_s, y[test_idx])
    return train, test, pca, scale


BENCH_MEAN0 = 0.35
BENCH_SEPARATION = math.pi / 2
BENCH_SIGMA = 0.10


def make_synthetic_benchmark(
    seed: int,
    n_train: int = 40,
    n_test: int = 10,
    dim: int = 4,
    *,
    mean0: float = BENCH_MEAN0,
    separation: float = BENCH_SEPARATION,
    sigma: float = BENCH_SIGMA,
):
    """Separable two-class benchmark already in encoding range.

    Class means sit at mean0 and mean0 + separation in every feature, with
    Gaussian jitter clipped into [0, pi].  The default separation puts the
    classes pi/2 apart per feature.
    """
    rng = np.random.Generator(np.random.PCG64(seed))

    def draw(n: int, mean: float) -> np.ndarray:
        return np.clip(rng.normal(mean, sigma, size=(n, dim)), 0.0, math.pi)

    def split(n: int) -> tuple:
        return n // 2, n - n // 2

    tr0, tr1 = split(n_train)
    te0, te1 = split(n_test)
    X_train = np.vstack([draw(tr0, mean0), draw(tr1, mean0 + separation)])
    y_train = np.array([0] * tr0 + [1] * tr1)
    X_test = np.vstack([draw(te0, mean0), draw(te1, mean0 + separation)])
    y_test = np.array([0] * te0 + [1] * te1)
    return LabeledDataset(X_train, y_train), LabeledDataset(X_test, y_test)


def write_feature_cache(path, X: np.ndarray, y: np.ndarray, *, source_hash: str, k: int, dims: int, seed: int) -> None:
    """Cache a feature matrix as CSV with a provenance comment line."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=int).reshape(-1)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# source={source_hash} k={k} dims={dims} seed={seed}\n")
        fh.write(",".join(f"f{j}" for j in range(X.shape[1])) + ",label\n")
        for row, label in zip(X, y):
            fh.write(",".join(f"{v:.17g}" for v in row) + f",{label}\n")


def read_feature_cache(path):
    """Read a cache written by :func:`write_feature_cache`."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3 or not lines[0].startswith("#"):
        raise ValueError(f"{path}: not a feature cache")
    meta = dict(part.split("=", 1) for part in lines[0][1:].split())
    rows = [line.split(",") for line in lines[2:] if line.strip()]
    X = np.array([[float(v) for v in r[:-1]] for r in rows])
    y = np.array([int(r[-1]) for r in rows])
    return X, y, meta


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
