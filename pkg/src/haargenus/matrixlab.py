"""Dense matrix arithmetic, Haar orthogonal sampling, Monte Carlo estimators,
and the entrywise brute-force moment oracle.

Exact mode carries Fractions end to end; float mode uses numpy with
fixed-order compensated summation, so results are reproducible bit for bit
for a given seed regardless of worker count (samples are drawn from
counter-based Philox substreams keyed by (seed, sample index), and chunk
boundaries are fixed independently of the worker count).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .weingarten import TableSet, pairing_join_diagram
from .setpart import enumerate_pairings

RNG_NAME = "philox4x64"
MC_CHUNK = 512


class DenseMatrix:
    """A square matrix in a uniform scalar mode: exact Fractions or floats."""

    __slots__ = ("mode", "n", "_rows", "_arr")

    def __init__(self, rows=None, *, arr=None):
        if arr is not None:
            arr = np.asarray(arr, dtype=float)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValidationError("matrix must be square")
            self.mode = "float"
            self.n = arr.shape[0]
            self._arr = arr
            self._rows = None
            return
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValidationError("matrix must be square")
        if any(isinstance(v, float) for r in rows for v in r):
            self.mode = "float"
            self._arr = np.array([[float(v) for v in r] for r in rows], dtype=float)
            self._rows = None
        else:
            self.mode = "exact"
            self._rows = tuple(tuple(Fraction(v) for v in r) for r in rows)
            self._arr = None
        self.n = n

    @classmethod
    def identity(cls, n: int, mode: str = "exact") -> "DenseMatrix":
        if mode == "float":
            return cls(arr=np.eye(n))
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n: int, mode: str = "exact") -> "DenseMatrix":
        if mode == "float":
            return cls(arr=np.zeros((n, n)))
        return cls([[0] * n for _ in range(n)])

    @property
    def rows(self):
        if self.mode != "exact":
            raise ValidationError("rows are only stored in exact mode")
        return self._rows

    def as_numpy(self) -> np.ndarray:
        if self.mode == "float":
            return self._arr
        return np.array([[float(v) for v in r] for r in self._rows], dtype=float)

    def to_float(self) -> "DenseMatrix":
        return self if self.mode == "float" else DenseMatrix(arr=self.as_numpy())

    def transpose(self) -> "DenseMatrix":
        if self.mode == "float":
            return DenseMatrix(arr=self._arr.T.copy())
        return DenseMatrix([[self._rows[j][i] for j in range(self.n)] for i in range(self.n)])

    def matmul(self, other: "DenseMatrix") -> "DenseMatrix":
        self._check_compatible(other)
        if self.mode == "float":
            return DenseMatrix(arr=self._arr @ other._arr)
        bt = list(zip(*other._rows))
        return DenseMatrix([[sum(a * b for a, b in zip(row, col)) for col in bt]
                            for row in self._rows])

    __matmul__ = matmul

    def add(self, other: "DenseMatrix") -> "DenseMatrix":
        self._check_compatible(other)
        if self.mode == "float":
            return DenseMatrix(arr=self._arr + other._arr)
        return DenseMatrix([[a + b for a, b in zip(r1, r2)]
                            for r1, r2 in zip(self._rows, other._rows)])

    def scale(self, s) -> "DenseMatrix":
        if self.mode == "float":
            return DenseMatrix(arr=self._arr * float(s))
        return DenseMatrix([[v * Fraction(s) for v in r] for r in self._rows])

    def sub(self, other: "DenseMatrix") -> "DenseMatrix":
        return self.add(other.scale(-1))

    def trace(self):
        if self.mode == "float":
            return float(np.trace(self._arr))
        return sum(self._rows[i][i] for i in range(self.n))

    def normalized_trace(self):
        t = self.trace()
        return t / self.n if self.mode == "float" else Fraction(t, self.n)

    def _check_compatible(self, other: "DenseMatrix") -> None:
        if self.n != other.n:
            raise ValidationError(f"dimension mismatch: {self.n} vs {other.n}")
        if self.mode != other.mode:
            raise ValidationError("mixed exact and float matrices")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseMatrix) or self.n != other.n or self.mode != other.mode:
            return False
        if self.mode == "float":
            return bool(np.array_equal(self._arr, other._arr))
        return self._rows == other._rows

    def __repr__(self) -> str:
        return f"DenseMatrix(n={self.n}, mode={self.mode})"

    def to_json(self) -> list[list]:
        if self.mode == "float":
            return [[float(v) for v in r] for r in self._arr]
        return [[str(v) for v in r] for r in self._rows]

    @classmethod
    def from_json(cls, data) -> "DenseMatrix":
        rows = []
        for r in data:
            row = []
            for v in r:
                row.append(Fraction(v) if isinstance(v, str) else v)
            rows.append(row)
        return cls(rows)


def block_diagonal_repeat(block: DenseMatrix, n: int) -> DenseMatrix:
    """Copies of `block` down the diagonal of an n x n matrix.

    Traces of words in such matrices equal the block-word traces after
    normalization, so they do not depend on n (n a multiple of the block
    size); this gives exact matrix families with a limit distribution.
    """
    m = block.n
    if n % m:
        raise ValidationError("dimension must be a multiple of the block size")
    if block.mode == "float":
        out = np.zeros((n, n))
        for s in range(0, n, m):
            out[s:s + m, s:s + m] = block.as_numpy()
        return DenseMatrix(arr=out)
    zero = Fraction(0)
    rows = []
    for r in range(n):
        row = [zero] * n
        base = (r // m) * m
        for c in range(m):
            row[base + c] = block.rows[r % m][c]
        rows.append(row)
    return DenseMatrix(rows)


def resolve_slot(matrices: Mapping[int, DenseMatrix], label: int) -> DenseMatrix:
    """Matrix for a signed label: negative labels mean the transpose."""
    base = matrices.get(abs(label))
    if base is None:
        raise ValidationError(f"no matrix for label {abs(label)}")
    return base.transpose() if label < 0 else base


def trace_along(cycles: Iterable[Sequence[int]], matrices: Mapping[int, DenseMatrix],
                normalized: bool = False):
    """Product over cycles of the trace of the matrix product along the cycle.

    Cycle entries are signed labels; the normalized variant divides by N once
    per cycle."""
    total = None
    for cyc in cycles:
        prod = None
        for label in cyc:
            m = resolve_slot(matrices, label)
            prod = m if prod is None else prod @ m
        t = prod.normalized_trace() if normalized else prod.trace()
        total = t if total is None else total * t
    if total is None:
        return Fraction(1)
    return total


def trace_index_sum(cycles: Iterable[Sequence[int]], matrices: Mapping[int, DenseMatrix]):
    """Literal index-sum form of the trace along a permutation (test oracle).

    Sums over all index assignments i: points -> [N] the product of entries
    X^(k)[i_k, i_pi(k)]."""
    nxt = {}
    for cyc in cycles:
        for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
            nxt[a] = b
    points = sorted(nxt)
    mats = {k: resolve_slot(matrices, k) for k in points}
    n = next(iter(mats.values())).n if mats else 0
    total = Fraction(0)
    for assign in itertools.product(range(n), repeat=len(points)):
        idx = dict(zip(points, assign))
        term = Fraction(1)
        for k in points:
            term *= mats[k].rows[idx[k]][idx[nxt[k]]]
        total += term
    return total


# -- Haar sampling ------------------------------------------------------------


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based substream for one sample."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def haar_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix: QR of a Gaussian with the
    triangular factor's diagonal made positive (plain QR is not Haar)."""
    z = rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int
    seed: int
    generator: str = RNG_NAME

    def within(self, exact, k: float = 5.0) -> bool:
        return abs(self.mean - float(exact)) <= k * self.std_error

    def z_score(self, exact) -> float:
        if self.std_error == 0:
            return 0.0 if self.mean == float(exact) else math.inf
        return (self.mean - float(exact)) / self.std_error

    def to_json(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error,
                "samples": self.samples, "seed": self.seed, "generator": self.generator}


def _expr_sampler(expr, matrices: Mapping[int, DenseMatrix], n: int):
    """Compile an expression into a function of the per-color O samples that
    returns the product of normalized traces."""
    mats = {}
    for k in expr.positions:
        label = expr.slot[k]
        if label == 0:
            mats[k] = np.eye(n)
        else:
            mats[k] = resolve_slot(matrices, label).to_float().as_numpy()
        if mats[k].shape[0] != n:
            raise ValidationError("matrix dimension does not match N")
    cycles = [tuple(c) for c in expr.cycles]
    colors = sorted({expr.color[k] for k in expr.positions})

    def statistic(o_by_color: Mapping[int, np.ndarray]) -> float:
        value = 1.0
        for cyc in cycles:
            prod = None
            for k in cyc:
                o = o_by_color[expr.color[k]]
                f = o if expr.eps[k] == 1 else o.T
                fm = f @ mats[k]
                prod = fm if prod is None else prod @ fm
            value *= prod.trace() / n
        return value

    return statistic, colors


def _kahan_total(chunks: Iterable[np.ndarray]) -> tuple[float, float, int]:
    """Compensated sum and sum of squares in fixed chunk order."""
    total = comp = 0.0
    total2 = comp2 = 0.0
    count = 0
    for arr in chunks:
        for v in arr:
            y = v - comp
            t = total + y
            comp = (t - total) - y
            total = t
            y2 = v * v - comp2
            t2 = total2 + y2
            comp2 = (t2 - total2) - y2
            total2 = t2
            count += 1
    return total, total2, count


def _chunk_values(compute_sample, samples: int, workers: int) -> list[np.ndarray]:
    """Evaluate per-sample values in fixed chunks of MC_CHUNK, optionally in
    parallel; the chunk grid does not depend on the worker count."""
    starts = list(range(0, samples, MC_CHUNK))

    def run(start: int) -> np.ndarray:
        stop = min(start + MC_CHUNK, samples)
        return np.array([compute_sample(i) for i in range(start, stop)], dtype=float)

    if workers <= 1:
        return [run(s) for s in starts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, starts))


def mc_moment(expr, matrices: Mapping[int, DenseMatrix], n: int, samples: int,
              seed: int, workers: int = 1) -> McEstimate:
    """Monte Carlo estimate of the expected product of normalized traces,
    with fresh independent O per color per sample."""
    statistic, colors = _expr_sampler(expr, matrices, n)

    def compute_sample(i: int) -> float:
        rng = sample_rng(seed, i)
        o_by_color = {c: haar_orthogonal(n, rng) for c in colors}
        return statistic(o_by_color)

    total, total2, count = _kahan_total(_chunk_values(compute_sample, samples, workers))
    mean = total / count
    var = max(total2 / count - mean * mean, 0.0) * count / max(count - 1, 1)
    return McEstimate(mean=mean, std_error=math.sqrt(var / count), samples=count, seed=seed)


def mc_entry_moment(n: int, powers: Mapping[tuple[int, int], int], samples: int,
                    seed: int, workers: int = 1) -> McEstimate:
    """Monte Carlo moments of individual entries, e.g. E[O_11^2 O_22^2]."""

    def compute_sample(i: int) -> float:
        o = haar_orthogonal(n, sample_rng(seed, i))
        v = 1.0
        for (r, c), p in powers.items():
            v *= o[r - 1, c - 1] ** p
        return v

    total, total2, count = _kahan_total(_chunk_values(compute_sample, samples, workers))
    mean = total / count
    var = max(total2 / count - mean * mean, 0.0) * count / max(count - 1, 1)
    return McEstimate(mean=mean, std_error=math.sqrt(var / count), samples=count, seed=seed)


def _k_statistic(sums: dict, r: int) -> float:
    """Unbiased joint cumulant from raw power sums of r <= 3 variables."""
    m = sums["count"]
    if r == 2:
        return (m * sums["xy"] - sums["x"] * sums["y"]) / (m * (m - 1))
    if r == 3:
        xb, yb, zb = sums["x"] / m, sums["y"] / m, sums["z"] / m
        centered = (sums["xyz"] - xb * sums["yz"] - yb * sums["xz"] - zb * sums["xy"]
                    + 2 * m * xb * yb * zb)
        return m * centered / ((m - 1) * (m - 2))
    raise ValidationError("cumulant estimator supports orders 2 and 3")


def mc_cumulant(exprs: Sequence, matrices: Mapping[int, DenseMatrix], n: int,
                samples: int, seed: int, order: int, workers: int = 1,
                batches: int = 20) -> McEstimate:
    """k-statistic estimate of the joint cumulant of unnormalized traces,
    with standard error from a jackknife over `batches` sample batches."""
    if order not in (2, 3):
        raise ValidationError("unsupported cumulant order (use 2 or 3)")
    if len(exprs) != order:
        raise ValidationError("need exactly one expression per argument")
    batches = max(2, min(batches, samples // 2))
    compiled = [_expr_sampler(e, matrices, n) for e in exprs]
    all_colors = sorted({c for _, cols in compiled for c in cols})

    def compute_sample(i: int) -> np.ndarray:
        rng = sample_rng(seed, i)
        o_by_color = {c: haar_orthogonal(n, rng) for c in all_colors}
        # traces are unnormalized: one factor of N per trace cycle
        return np.array([stat(o_by_color) * n ** len(e.cycles)
                         for e, (stat, _) in zip(exprs, compiled)], dtype=float)

    per_batch = [dict(count=0, x=0.0, y=0.0, z=0.0, xy=0.0, xz=0.0, yz=0.0, xyz=0.0)
                 for _ in range(batches)]
    starts = list(range(0, samples, MC_CHUNK))

    def run(start: int) -> list[tuple[int, np.ndarray]]:
        stop = min(start + MC_CHUNK, samples)
        return [(i, compute_sample(i)) for i in range(start, stop)]

    if workers <= 1:
        chunk_results = [run(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunk_results = list(pool.map(run, starts))
    for chunk in chunk_results:
        for i, v in chunk:
            b = per_batch[(i * batches) // samples]
            b["count"] += 1
            b["x"] += v[0]
            b["y"] += v[1]
            b["xy"] += v[0] * v[1]
            if order == 3:
                b["z"] += v[2]
                b["xz"] += v[0] * v[2]
                b["yz"] += v[1] * v[2]
                b["xyz"] += v[0] * v[1] * v[2]

    def merged(skip: int | None) -> dict:
        out = dict(count=0, x=0.0, y=0.0, z=0.0, xy=0.0, xz=0.0, yz=0.0, xyz=0.0)
        for b_idx, b in enumerate(per_batch):
            if b_idx == skip:
                continue
            for key in out:
                out[key] += b[key]
        return out

    full = _k_statistic(merged(None), order)
    leave_outs = [_k_statistic(merged(b), order) for b in range(batches)]
    lo_mean = sum(leave_outs) / batches
    se = math.sqrt((batches - 1) / batches * sum((v - lo_mean) ** 2 for v in leave_outs))
    return McEstimate(mean=full, std_error=se, samples=samples, seed=seed)


# -- exact brute-force oracle --------------------------------------------------


def brute_force_moment(expr, matrices: Mapping[int, DenseMatrix], n: int,
                       tables: TableSet | None = None, max_positions: int = 8,
                       max_dim: int = 4) -> Fraction:
    """Exact expected product of normalized traces by the explicit index sum.

    Sums over every index assignment iota: +/-positions -> [N]; the expected
    value of the product of O entries is expanded as the sum of Weingarten
    values over the pairings compatible with the assignment.  Shares nothing
    with the genus-expansion path beyond the Weingarten table itself.
    """
    tables = tables or TableSet()
    positions = sorted(expr.positions)
    npos = len(positions)
    if npos > max_positions or n > max_dim:
        raise ValidationError("brute-force oracle capped (positions or dimension too large)")
    by_color: dict[int, list[int]] = {}
    for k in positions:
        by_color.setdefault(expr.color[k], []).append(k)
    if any(len(v) % 2 for v in by_color.values()):
        return Fraction(0)  # no pairings exist; every term vanishes

    phi_next = {}
    for cyc in expr.cycles:
        for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
            phi_next[a] = b

    # integer-scaled entries; one common denominator per slot occurrence
    order = positions + [-k for k in positions]
    index_of = {p: i for i, p in enumerate(order)}
    scale = Fraction(1)
    entry_tables = []
    row_pos, col_pos = [], []
    for k in positions:
        m = DenseMatrix.identity(n) if expr.slot[k] == 0 \
            else resolve_slot(matrices, expr.slot[k])
        if m.mode != "exact":
            raise ValidationError("brute-force oracle needs exact matrices")
        if m.n != n:
            raise ValidationError("matrix dimension does not match N")
        denom = math.lcm(*[v.denominator for row in m.rows for v in row])
        scaled = [[int(v * denom) for v in row] for row in m.rows]
        scale *= denom
        entry_tables.append(scaled)
        row_pos.append(index_of[-expr.eps[k] * k])
        col_pos.append(index_of[expr.eps[abs(phi_next[k])] * phi_next[k]])

    # per-color expectation of the product of O entries, memoized on the
    # index values at (positions, negated positions) of that color
    color_keys = []
    color_memos = []
    wg_at_n: dict = {}
    for c, pts in sorted(by_color.items()):
        pairs = []
        for p_plus in enumerate_pairings(pts):
            for p_minus in enumerate_pairings(pts):
                lam = pairing_join_diagram(p_plus, p_minus)
                if lam not in wg_at_n:
                    wg_at_n[lam] = tables.table(2 * lam.n).wg_unnormalized(lam).eval_at(n)
                plus_map = {k: next(iter(b - {k})) for b in p_plus.blocks for k in b}
                minus_map = {k: next(iter(b - {k})) for b in p_minus.blocks for k in b}
                pairs.append((plus_map, minus_map, wg_at_n[lam]))
        color_keys.append(([index_of[k] for k in pts], [index_of[-k] for k in pts], pts))
        color_memos.append((pairs, {}))

    def o_expectation(color_idx: int, iota) -> Fraction:
        (pos_idx, neg_idx, pts) = color_keys[color_idx]
        pairs, memo = color_memos[color_idx]
        key = tuple(iota[i] for i in pos_idx) + tuple(iota[i] for i in neg_idx)
        val = memo.get(key)
        if val is None:
            val = Fraction(0)
            vplus = dict(zip(pts, key[:len(pts)]))
            vminus = dict(zip(pts, key[len(pts):]))
            for plus_map, minus_map, wg in pairs:
                if all(vplus[k] == vplus[p] for k, p in plus_map.items()) and \
                        all(vminus[k] == vminus[p] for k, p in minus_map.items()):
                    val += wg
            memo[key] = val
        return val

    ncolors = len(color_keys)
    sums_by_weight: dict[tuple, int] = {}
    for iota in itertools.product(range(n), repeat=2 * npos):
        wkey = tuple(o_expectation(ci, iota) for ci in range(ncolors))
        if not all(wkey):
            continue
        prod = 1
        for t, rp, cp in zip(entry_tables, row_pos, col_pos):
            prod *= t[iota[rp]][iota[cp]]
        sums_by_weight[wkey] = sums_by_weight.get(wkey, 0) + prod

    total = Fraction(0)
    for wkey, s in sums_by_weight.items():
        weight = Fraction(1)
        for w in wkey:
            weight *= w
        total += weight * s
    return total / scale / Fraction(n) ** len(expr.cycles)
