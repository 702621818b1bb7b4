"""Genus-expansion evaluation of trace moments and trace cumulants.

A trace expression encodes a product of traces of words O_c^{+/-1} X along
boundary cycles.  Its expected value expands as a sum over tuples of pairing
pairs (one alternating premap per colour): each term carries N to the Euler
characteristic of the gluing minus twice the number of traces, a product of
normalized Weingarten values, and the product of traces of the X matrices
along the particular cycles of the inverse vertex permutation.

Trace cumulants use the same gluings but weight each by a relative Weingarten
cumulant and by classical cumulants of the vertex traces, keeping only the
gluings that connect everything.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import CapExceededError, ValidationError
from .matrixlab import DenseMatrix, trace_along
from .permap import Premap, SignedPermutation, pairings_to_premap
from .ratpoly import PolyFrac
from .setpart import SetPartition, YoungDiagram, enumerate_interval, enumerate_pairings, \
    enumerate_partitions, kernel_of
from .weingarten import TableSet, pairing_join_diagram, wg_cumulant

TERM_CAP = 500_000

_DEFAULT_TABLES: TableSet | None = None


def default_tables() -> TableSet:
    global _DEFAULT_TABLES
    if _DEFAULT_TABLES is None:
        _DEFAULT_TABLES = TableSet()
    return _DEFAULT_TABLES


IDENTITY_SLOT = 0


class TraceExpression:
    """A product of traces of words in O-factors and matrix slots.

    Positions are positive integers; `cycles` lists them in trace order.
    Each position k carries an O-exponent eps[k] (+1 or -1 for transpose), a
    colour color[k] (which independent O it uses), and a signed matrix slot
    slot[k] (negative = transposed matrix, 0 = identity).
    """

    def __init__(self, cycles: Sequence[Sequence[int]], eps: Mapping[int, int],
                 color: Mapping[int, int], slot: Mapping[int, int]):
        self.cycles = tuple(tuple(c) for c in cycles)
        pts = [k for c in self.cycles for k in c]
        if len(set(pts)) != len(pts):
            raise ValidationError("trace cycles overlap")
        if any(k <= 0 for k in pts):
            raise ValidationError("positions must be positive")
        self.positions = tuple(sorted(pts))
        self.eps = {k: int(eps[k]) for k in self.positions}
        self.color = {k: int(color[k]) for k in self.positions}
        self.slot = {k: int(slot[k]) for k in self.positions}
        if any(v not in (1, -1) for v in self.eps.values()):
            raise ValidationError("eps values must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def num_traces(self) -> int:
        return len(self.cycles)

    def phi(self) -> SignedPermutation:
        return SignedPermutation.from_cycles(self.cycles)

    def positions_by_color(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for k in self.positions:
            out.setdefault(self.color[k], []).append(k)
        return {c: sorted(v) for c, v in sorted(out.items())}

    def vertex_label(self, k: int) -> int:
        """Effective matrix label at signed position k (transposed if k < 0)."""
        s = self.slot[abs(k)]
        if s == IDENTITY_SLOT:
            return IDENTITY_SLOT
        return s if k > 0 else -s

    def label_cycles(self, cycles: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
        """Map position cycles through the slots, dropping identity factors."""
        out = []
        for c in cycles:
            labels = tuple(self.vertex_label(k) for k in c)
            out.append(tuple(l for l in labels if l != IDENTITY_SLOT))
        return tuple(out)

    # -- builders -------------------------------------------------------------

    @classmethod
    def single_trace(cls, factors: Sequence[tuple[int, int, int]],
                     start: int = 1) -> "TraceExpression":
        """One trace from (color, eps, slot) factors, positions start, start+1, ..."""
        ks = list(range(start, start + len(factors)))
        return cls([ks],
                   {k: f[1] for k, f in zip(ks, factors)},
                   {k: f[0] for k, f in zip(ks, factors)},
                   {k: f[2] for k, f in zip(ks, factors)})

    @classmethod
    def conjugated_word(cls, colors: Sequence[int], slots: Sequence[int],
                        start: int = 1) -> "TraceExpression":
        """tr(O_c1^T X_1 O_c1 O_c2^T X_2 O_c2 ...): each word letter becomes an
        odd position carrying the matrix and an even identity position."""
        factors = []
        for c, s in zip(colors, slots):
            factors.append((c, -1, s))
            factors.append((c, 1, IDENTITY_SLOT))
        return cls.single_trace(factors, start=start)

    def to_json(self) -> dict:
        return {"traces": [[{"color": self.color[k], "eps": self.eps[k],
                             "slot": self.slot[k]} for k in c] for c in self.cycles]}

    @classmethod
    def from_json(cls, data: Mapping) -> "TraceExpression":
        cycles = []
        eps: dict[int, int] = {}
        color: dict[int, int] = {}
        slot: dict[int, int] = {}
        k = 1
        for trace in data["traces"]:
            cyc = []
            for entry in trace:
                cyc.append(k)
                eps[k] = entry["eps"]
                color[k] = entry["color"]
                slot[k] = entry["slot"]
                k += 1
            cycles.append(cyc)
        return cls(cycles, eps, color, slot)


def concatenate(exprs: Sequence[TraceExpression]) -> TraceExpression:
    """Relabel a list of expressions to consecutive positions, one after another."""
    cycles = []
    eps: dict[int, int] = {}
    color: dict[int, int] = {}
    slot: dict[int, int] = {}
    offset = 0
    for e in exprs:
        remap = {k: i + 1 + offset for i, k in enumerate(e.positions)}
        for c in e.cycles:
            cycles.append([remap[k] for k in c])
        for k in e.positions:
            eps[remap[k]] = e.eps[k]
            color[remap[k]] = e.color[k]
            slot[remap[k]] = e.slot[k]
        offset += e.n
    return TraceExpression(cycles, eps, color, slot)


@dataclass(frozen=True)
class ExpansionTerm:
    """One gluing of the expansion and everything needed to evaluate it."""

    pairings: tuple[tuple[SetPartition, SetPartition], ...]  # per colour
    alpha: Premap
    chi: int
    exponent: int
    wg_factor: PolyFrac
    lambdas: tuple[YoungDiagram, ...]
    vertex_cycles: tuple[tuple[int, ...], ...]
    vertex_labels: tuple[tuple[int, ...], ...]


def _delta_eps(eps: Mapping[int, int], k: int) -> int:
    return eps[abs(k)] * k


class _Gluings:
    """Shared enumeration machinery over per-colour pairing pairs."""

    def __init__(self, expr: TraceExpression, tables: TableSet, term_cap: int):
        self.expr = expr
        self.tables = tables
        by_color = expr.positions_by_color()
        self.colors = list(by_color)
        self.odd = any(len(p) % 2 for p in by_color.values())
        self.choices: list[list[tuple]] = []
        total = 1
        if not self.odd:
            for c in self.colors:
                pts = by_color[c]
                opts = []
                pair_list = list(enumerate_pairings(pts))
                for p_plus in pair_list:
                    for p_minus in pair_list:
                        lam = pairing_join_diagram(p_plus, p_minus)
                        a = pairings_to_premap(p_plus, p_minus)
                        opts.append((p_plus, p_minus, a, lam, tables.wg_diagram(lam)))
                self.choices.append(opts)
                total *= len(opts)
            if total > term_cap:
                raise CapExceededError(
                    f"expansion has {total} terms, beyond the cap of {term_cap}")
        self.total = 0 if self.odd else total
        phi = expr.phi()
        full = list(expr.positions) + [-k for k in expr.positions]
        self._fp = {k: phi(k) if k > 0 else k for k in full}
        self._fm_inv = {k: -phi.inverse()(-k) if k < 0 else k for k in full}
        self._full = full
        self.num_traces = expr.num_traces

    def combos(self) -> Iterator[tuple]:
        if self.odd:
            return iter(())
        return itertools.product(*self.choices)

    def k_inverse_map(self, alpha_map: dict[int, int]) -> dict[int, int]:
        """phi_-^{-1} (d_eps alpha d_eps) phi_+ as a raw mapping."""
        eps = self.expr.eps
        fm_inv, fp = self._fm_inv, self._fp
        out = {}
        for k in self._full:
            t = fp[k]
            t = _delta_eps(eps, t)
            t = alpha_map[t]
            t = _delta_eps(eps, t)
            out[k] = fm_inv[t]
        return out

    def particular_cycles(self, mapping: dict[int, int]) -> tuple[tuple[int, ...], ...]:
        seen: set[int] = set()
        out = []
        for start in sorted(mapping, key=lambda k: (abs(k), k < 0)):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            k = mapping[start]
            while k != start:
                cyc.append(k)
                seen.add(k)
                k = mapping[k]
            if cyc[0] > 0:
                out.append(tuple(cyc))
        return tuple(out)

    def term_for(self, combo: tuple) -> ExpansionTerm:
        alpha_map: dict[int, int] = {}
        wg_factor = PolyFrac(1)
        lambdas = []
        alpha_cycles = 0
        for (_, _, a, lam, wg) in combo:
            alpha_map.update(a._map)
            wg_factor = wg_factor * wg
            lambdas.append(lam)
            alpha_cycles += 2 * lam.num_rows
        kinv = self.k_inverse_map(alpha_map)
        vertex = self.particular_cycles(kinv)
        chi = self.num_traces + alpha_cycles // 2 + len(vertex) - self.expr.n
        return ExpansionTerm(
            pairings=tuple((p, q) for (p, q, _, _, _) in combo),
            alpha=Premap(alpha_map),
            chi=chi,
            exponent=chi - 2 * self.num_traces,
            wg_factor=wg_factor,
            lambdas=tuple(lambdas),
            vertex_cycles=vertex,
            vertex_labels=self.expr.label_cycles(vertex),
        )


def expand_moment(expr: TraceExpression, tables: TableSet | None = None,
                  term_cap: int = TERM_CAP) -> Iterator[ExpansionTerm]:
    """Stream every gluing term of the expected product of normalized traces.

    Empty for expressions with an odd number of O-factors of some colour."""
    glu = _Gluings(expr, tables or default_tables(), term_cap)
    for combo in glu.combos():
        yield glu.term_for(combo)


@dataclass
class MomentResult:
    value: object
    term_count: int
    breakdown: dict | None = None

    def to_json(self) -> dict:
        val = str(self.value) if isinstance(self.value, Fraction) else self.value
        return {"value": val, "terms": self.term_count}


def _identity_filled(matrices: Mapping[int, DenseMatrix], n: int, mode: str):
    mats = dict(matrices)
    mats[IDENTITY_SLOT] = DenseMatrix.identity(n, mode=mode)
    return mats


def _resolve_for_mode(matrices: Mapping[int, DenseMatrix], n: int, mode: str):
    out = {}
    for label, m in matrices.items():
        if m.n != n:
            raise ValidationError(f"matrix {label} is {m.n}x{m.n}, expected {n}x{n}")
        if mode == "float":
            out[label] = m.to_float()
        else:
            if m.mode != "exact":
                raise ValidationError("exact mode requires exact (rational) matrices")
            out[label] = m
    return out


def evaluate_moment(expr: TraceExpression, matrices: Mapping[int, DenseMatrix],
                    n: int, mode: str = "exact", tables: TableSet | None = None,
                    term_cap: int = TERM_CAP, keep_breakdown: bool = False) -> MomentResult:
    """Exact (or float) value of the expected product of normalized traces.

    Groups gluings by their vertex trace pattern, so each distinct product of
    traces is evaluated once; coefficients are evaluated at N with pole
    detection."""
    tables = tables or default_tables()
    mats = _resolve_for_mode(matrices, n, mode)
    mats = _identity_filled(mats, n, mode)
    coeff_by_pattern: dict[tuple, Fraction] = {}
    count = 0
    for term in expand_moment(expr, tables=tables, term_cap=term_cap):
        count += 1
        coeff = _eval_coefficient(term, n)
        key = term.vertex_labels
        coeff_by_pattern[key] = coeff_by_pattern.get(key, Fraction(0)) + coeff
    if mode == "float":
        value = 0.0
        for key, coeff in coeff_by_pattern.items():
            value += float(coeff) * _trace_product(key, mats, n, "float")
    else:
        value = Fraction(0)
        for key, coeff in coeff_by_pattern.items():
            value += coeff * _trace_product(key, mats, n, "exact")
    breakdown = dict(coeff_by_pattern) if keep_breakdown else None
    return MomentResult(value=value, term_count=count, breakdown=breakdown)


def _eval_coefficient(term: ExpansionTerm, n: int) -> Fraction:
    """N^exponent times the Weingarten factor at N, naming the offending
    diagrams on a pole."""
    from .errors import PoleError

    try:
        return term.wg_factor.eval_at(n) * Fraction(n) ** term.exponent
    except PoleError as exc:
        rows = [list(l.rows) for l in term.lambdas]
        raise PoleError(
            f"Weingarten factor for diagram(s) {rows} has a pole at N={n}: {exc}",
            n_value=n, factors=exc.factors) from exc


def _trace_product(label_cycles: tuple[tuple[int, ...], ...],
                   matrices: Mapping[int, DenseMatrix], n: int, mode: str):
    value = Fraction(1) if mode == "exact" else 1.0
    for cyc in label_cycles:
        if not cyc:
            value *= 1 if mode == "exact" else 1.0  # trace of identity, normalized
            continue
        t = trace_along([cyc], matrices, normalized=True)
        value = value * t
    return value


@dataclass
class AsymptoticMoment:
    """Large-N limit: a finite combination of products of normalized traces."""

    terms: tuple[tuple[Fraction, tuple[tuple[int, ...], ...]], ...]

    def evaluate(self, matrices: Mapping[int, DenseMatrix], n: int, mode: str = "exact"):
        mats = _identity_filled(_resolve_for_mode(matrices, n, mode), n, mode)
        total = Fraction(0) if mode == "exact" else 0.0
        for coeff, pattern in self.terms:
            c = coeff if mode == "exact" else float(coeff)
            total = total + c * _trace_product(pattern, mats, n, mode)
        return total

    def is_zero(self) -> bool:
        return not self.terms

    def to_json(self) -> list:
        return [{"coefficient": str(c), "traces": [list(cc) for cc in pat]}
                for c, pat in self.terms]


def asymptotic_moment(expr: TraceExpression, tables: TableSet | None = None,
                      term_cap: int = TERM_CAP) -> AsymptoticMoment:
    """Keep only exponent-zero gluings, with Weingarten limits as coefficients."""
    acc: dict[tuple, Fraction] = {}
    for term in expand_moment(expr, tables=tables, term_cap=term_cap):
        if term.exponent != 0:
            continue
        coeff = term.wg_factor.limit_at_infinity()
        acc[term.vertex_labels] = acc.get(term.vertex_labels, Fraction(0)) + coeff
    terms = tuple((c, pat) for pat, c in sorted(acc.items()) if c != 0)
    return AsymptoticMoment(terms=terms)


# -- trace cumulants -----------------------------------------------------------


def _pi_partition(combo: tuple, positions: Sequence[int]) -> SetPartition:
    """Join of the pairing pairs, per colour, as a partition of the positions."""
    blocks = []
    for (p_plus, p_minus, _, _, _) in combo:
        blocks.extend((p_plus | p_minus).blocks)
    return SetPartition(blocks, ground=positions)


def _tau_sigma(blocks: Iterable[Iterable[int]],
               vertex: Sequence[tuple[int, ...]], ground) -> SetPartition:
    out = []
    for blk in blocks:
        pts: set[int] = set()
        for idx in blk:
            pts |= {abs(i) for i in vertex[idx]}
        out.append(pts)
    return SetPartition(out, ground=ground)


def trace_cumulant(exprs: Sequence[TraceExpression], *,
                   matrices: Mapping[int, DenseMatrix] | None = None,
                   n: int | None = None,
                   mode: str = "exact",
                   trace_value: Callable[[tuple[int, ...]], Fraction] | None = None,
                   kappa: Callable[[tuple[tuple[int, ...], ...]], Fraction] | None = None,
                   symbolic: bool = False,
                   tables: TableSet | None = None,
                   term_cap: int = TERM_CAP):
    """Joint cumulant of the unnormalized traces of single-trace expressions.

    k_r(Y_1, ..., Y_r) = sum over gluings of N^(chi - r) times the relative
    Weingarten cumulant C_{pi,pi,rho} times classical cumulants of the vertex
    traces, over (rho, tau) whose join with the trace partition connects
    everything.

    Deterministic slot matrices are the built-in path (higher vertex-trace
    cumulants vanish); pass `kappa` to supply them for random slots.  With
    symbolic=True the result is a PolyFrac in N and `trace_value` must return
    exact N-free values for label cycles.
    """
    tables = tables or default_tables()
    if any(e.num_traces != 1 for e in exprs):
        raise ValidationError("trace_cumulant takes single-trace expressions")
    expr = concatenate(exprs)
    r = len(exprs)
    if symbolic:
        if trace_value is None:
            raise ValidationError("symbolic cumulants need an N-free trace_value")
        tv = trace_value
    elif trace_value is not None:
        # random-slot path: the caller supplies expected vertex traces (and
        # kappa for the higher vertex-trace cumulants)
        if n is None:
            raise ValidationError("numeric cumulants need N")
        tv = trace_value
    else:
        if matrices is None or n is None:
            raise ValidationError("numeric cumulants need matrices and N")
        mats = _identity_filled(_resolve_for_mode(matrices, n, mode), n, mode)
        cache: dict[tuple, object] = {}

        def tv(cycle: tuple[int, ...]):
            if cycle not in cache:
                cache[cycle] = _trace_product((cycle,), mats, n, mode)
            return cache[cycle]

    glu = _Gluings(expr, tables, term_cap)
    phi_part = expr.phi().orbit_partition()
    ker_w = kernel_of(expr.color)
    ground = expr.positions
    full = SetPartition.full(ground)
    c_cache: dict[tuple, PolyFrac] = {}

    def relative_cumulant(pi: SetPartition, rho: SetPartition) -> PolyFrac:
        key = tuple(sorted(
            tuple(sorted(len(b) for b in pi.blocks if b <= blk))
            for blk in rho.blocks))
        if key not in c_cache:
            c_cache[key] = wg_cumulant(tables, pi, pi, rho)
        return c_cache[key]

    total_sym = PolyFrac(0)
    total_num = Fraction(0) if mode == "exact" else 0.0
    for combo in glu.combos():
        term = glu.term_for(combo)
        pi = _pi_partition(combo, ground)
        vertex = term.vertex_cycles
        labels = term.vertex_labels
        s = len(vertex)
        if kappa is None:
            tau_choices = [tuple((i,) for i in range(s))]
        else:
            tau_choices = [tuple(tuple(sorted(b)) for b in p.blocks)
                           for p in enumerate_partitions(range(1, s + 1), cap=max(12, s))]
            tau_choices = [tuple(tuple(i - 1 for i in b) for b in blocks)
                           for blocks in tau_choices]
        for tau_blocks in tau_choices:
            tau_sigma = _tau_sigma(tau_blocks, vertex, ground)
            if kappa is None:
                k_tau = Fraction(1)
                for blk in tau_blocks:
                    k_tau *= tv(labels[blk[0]])
            else:
                k_tau = Fraction(1)
                for blk in tau_blocks:
                    if len(blk) == 1:
                        k_tau *= tv(labels[blk[0]])
                    else:
                        k_tau *= kappa(tuple(labels[i] for i in blk))
            if not k_tau:
                continue
            base = phi_part | tau_sigma
            for rho in enumerate_interval(pi, ker_w):
                if (base | rho) != full:
                    continue
                c_val = relative_cumulant(pi, rho)
                if symbolic:
                    total_sym = total_sym + \
                        PolyFrac.n_power(term.chi - r) * c_val * \
                        PolyFrac.from_fraction(Fraction(k_tau))
                else:
                    coeff = c_val.eval_at(n) * Fraction(n) ** (term.chi - r)
                    total_num = total_num + (coeff * k_tau if mode == "exact"
                                             else float(coeff) * k_tau)
    return total_sym if symbolic else total_num


def moment_symbolic(expr: TraceExpression,
                    trace_value: Callable[[tuple[int, ...]], Fraction],
                    tables: TableSet | None = None,
                    term_cap: int = TERM_CAP) -> PolyFrac:
    """The expected product of normalized traces as an exact PolyFrac in N,
    for N-free vertex trace values (block-repeated deterministic matrices)."""
    total = PolyFrac(0)
    for term in expand_moment(expr, tables=tables, term_cap=term_cap):
        tv = Fraction(1)
        for cyc in term.vertex_labels:
            tv *= trace_value(cyc)
        if not tv:
            continue
        total = total + PolyFrac.n_power(term.exponent) * term.wg_factor * \
            PolyFrac.from_fraction(tv)
    return total


def to_unnormalized(value, num_traces: int, n: int):
    """Convert a product of normalized traces to plain traces: times N per trace."""
    if isinstance(value, PolyFrac):
        return value * PolyFrac.n_power(num_traces)
    if isinstance(value, Fraction):
        return value * Fraction(n) ** num_traces
    return value * float(n) ** num_traces


def predicted_second_order_cov(phi_ab: Sequence[Sequence], phi_abt: Sequence[Sequence],
                               p: int, q: int):
    """Spoke prediction for the limiting covariance of two cyclically
    alternating centred products: zero unless p = q, else the sum over cyclic
    shifts of products of first-order mixed moments, direct and transposed."""
    if p != q:
        return Fraction(0)
    if len(phi_ab) != p or len(phi_abt) != p:
        raise ValidationError("need p x q tables of first-order values")
    total = Fraction(0)
    for k in range(p):
        direct = Fraction(1)
        flipped = Fraction(1)
        for i in range(p):
            direct *= Fraction(phi_ab[i][(k - i) % p])
            flipped *= Fraction(phi_abt[i][(k + i) % p])
        total += direct + flipped
    return total


def center_slots(matrices: Mapping[int, DenseMatrix],
                 labels: Iterable[int] | None = None) -> dict[int, DenseMatrix]:
    """Replace X by X - tr(X) Id (normalized trace) for the selected labels."""
    out = dict(matrices)
    for label in (labels if labels is not None else list(matrices)):
        m = out[label]
        ident = DenseMatrix.identity(m.n, mode=m.mode)
        out[label] = m.sub(ident.scale(m.normalized_trace()))
    return out


def check_conjugated_color_consistency(expr: TraceExpression,
                                       term: ExpansionTerm) -> bool:
    """For conjugated-word expressions (eps alternating -,+ and colours tied in
    odd/even pairs), every vertex cycle stays within one parity, and cycles of
    odd positions stay within one colour."""
    for cyc in term.vertex_cycles:
        parities = {abs(k) % 2 for k in cyc}
        if len(parities) != 1:
            return False
        if parities == {1}:
            colors = {expr.color[abs(k)] for k in cyc}
            if len(colors) != 1:
                return False
    return True
