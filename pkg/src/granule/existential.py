"""Finite-model checking for granular operator space axioms.

A :class:`FinitePartialSystem` carries explicit tables (parthood, order,
partial join/meet, lower/upper operators, granule flags) over a small finite
universe.  Axioms are decided by exhaustive quantification, with the
weak-equality convention for the lattice laws: a law instance only counts
when both terms are defined.  On top of that sit the admissibility checks for
granulations (WRA / LS / FU), the fixed-point machinery for self-determining
granule operators, and a builder for powerset systems induced by a
partition or cover.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .ball_kmeans import Dataset
from .metrics import DistanceFn, euclidean

__all__ = [
    "FinitePartialSystem",
    "AxiomSuite",
    "AxiomResult",
    "MashReport",
    "AdmissibleReport",
    "EggsReport",
    "GranuleOperator",
    "StructureError",
    "DivergenceError",
    "BudgetError",
    "UNDEFINED",
    "check_mash",
    "check_admissible",
    "iterate_to_fixpoint",
    "is_existential_granule",
    "check_eggs",
    "build_set_hgos",
    "identity_operator",
    "ball_refinement_operator",
    "parse_system_file",
    "format_system_file",
]

UNDEFINED = -1


class StructureError(ValueError):
    """Malformed system tables."""


class DivergenceError(RuntimeError):
    """An operator trajectory failed to stabilize within the step budget."""

    def __init__(self, message: str, trajectory: list):
        super().__init__(message)
        self.trajectory = trajectory


class BudgetError(RuntimeError):
    """An exhaustive enumeration would exceed the configured budget."""


@dataclass
class FinitePartialSystem:
    """Tables of a partial algebraic system over a finite universe.

    ``join``/``meet`` map index pairs to an element index or ``UNDEFINED``;
    ``lower``/``upper`` are total unary maps; ``parthood`` and ``order`` are
    boolean relation tables.  ``granules`` flags the distinguished elements.
    """

    elements: list
    parthood: np.ndarray
    order: np.ndarray
    join: np.ndarray
    meet: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    bottom: int
    top: int
    granules: np.ndarray

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise StructureError("universe must be non-empty")
        self.parthood = np.asarray(self.parthood, dtype=bool)
        self.order = np.asarray(self.order, dtype=bool)
        self.join = np.asarray(self.join, dtype=int)
        self.meet = np.asarray(self.meet, dtype=int)
        self.lower = np.asarray(self.lower, dtype=int)
        self.upper = np.asarray(self.upper, dtype=int)
        self.granules = np.asarray(self.granules, dtype=bool)
        for name, table, shape in (
            ("parthood", self.parthood, (n, n)),
            ("order", self.order, (n, n)),
            ("join", self.join, (n, n)),
            ("meet", self.meet, (n, n)),
            ("lower", self.lower, (n,)),
            ("upper", self.upper, (n,)),
            ("granules", self.granules, (n,)),
        ):
            if table.shape != shape:
                raise StructureError(f"{name} table has shape {table.shape}, want {shape}")
        for name, table in (("join", self.join), ("meet", self.meet)):
            if ((table < UNDEFINED) | (table >= n)).any():
                raise StructureError(f"{name} entries must be element indices or undefined")
        for name, table in (("lower", self.lower), ("upper", self.upper)):
            if ((table < 0) | (table >= n)).any():
                raise StructureError(f"{name} must be total into the universe")
        if not (0 <= self.bottom < n and 0 <= self.top < n):
            raise StructureError("bottom/top must be universe elements")

    @property
    def n(self) -> int:
        return len(self.elements)

    def index(self, element) -> int:
        return self.elements.index(element)

    def granule_indices(self) -> np.ndarray:
        return np.flatnonzero(self.granules)


_ALL_AXIOMS = (
    "PT1", "PT2", "G1", "G2", "G3", "G4", "G5",
    "UL1", "UL1*", "UL2", "UL3", "TB", "WRA", "LS", "FU",
)


@dataclass(frozen=True)
class AxiomSuite:
    """A selection of axioms; presets follow the named system variants."""

    axioms: frozenset

    def __post_init__(self):
        unknown = self.axioms - set(_ALL_AXIOMS)
        if unknown:
            raise ValueError(f"unknown axioms: {sorted(unknown)}")

    @classmethod
    def mash(cls) -> "AxiomSuite":
        return cls(frozenset({"PT1", "PT2", "G1", "G2", "G3", "G4", "G5", "UL1", "UL2", "UL3", "TB"}))

    @classmethod
    def ggs(cls) -> "AxiomSuite":
        return cls(cls.mash().axioms | {"WRA", "LS", "FU"})

    @classmethod
    def pre_ggs(cls) -> "AxiomSuite":
        return cls(cls.ggs().axioms - {"PT2"})

    @classmethod
    def pre_star_ggs(cls) -> "AxiomSuite":
        # UL1 additionally loses the "lower approximation is a part" clause
        return cls((cls.pre_ggs().axioms - {"UL1"}) | {"UL1*"})

    @classmethod
    def named(cls, name: str) -> "AxiomSuite":
        table = {
            "mash": cls.mash,
            "ggs": cls.ggs,
            "pre-ggs": cls.pre_ggs,
            "pre-star-ggs": cls.pre_star_ggs,
        }
        if name not in table:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(table)}")
        return table[name]()


@dataclass
class AxiomResult:
    passed: bool
    witness: Optional[tuple] = None


@dataclass
class MashReport:
    results: dict

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results.values())

    def failed(self) -> list[str]:
        return sorted(name for name, r in self.results.items() if not r.passed)


def _apply2(table: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """table[i, j] with undefined (-1) arguments propagating to undefined."""
    i, j = np.broadcast_arrays(i, j)
    out = np.full(i.shape, UNDEFINED, dtype=int)
    valid = (i >= 0) & (j >= 0)
    out[valid] = table[i[valid], j[valid]]
    return out


def _first_witness(mask: np.ndarray, sys: FinitePartialSystem) -> Optional[tuple]:
    idx = np.argwhere(mask)
    if not idx.size:
        return None
    return tuple(sys.elements[int(t)] for t in idx[0])


def check_mash(
    sys: FinitePartialSystem,
    suite: AxiomSuite = None,
    *,
    wra_mixed_depth2: bool = True,
) -> MashReport:
    """Decide each selected axiom by exhaustive quantification.

    Witnesses are lexicographically minimal in element order.  The lattice
    laws use weak equality: instances with an undefined side are vacuous.
    """
    if suite is None:
        suite = AxiomSuite.mash()
    n = sys.n
    p = sys.parthood
    le = sys.order
    jn = sys.join
    mt = sys.meet
    lo = sys.lower
    up = sys.upper
    ar = np.arange(n)
    results: dict[str, AxiomResult] = {}

    def put(name, viol_mask):
        results[name] = AxiomResult(not viol_mask.any(), _first_witness(viol_mask, sys))

    for ax in sorted(suite.axioms):
        if ax == "PT1":
            put("PT1", ~p[ar, ar])
        elif ax == "PT2":
            put("PT2", p & p.T & ~np.eye(n, dtype=bool))
        elif ax == "G1":
            for tbl, tag in ((jn, "join"), (mt, "meet")):
                both = (tbl >= 0) & (tbl.T >= 0)
                viol = both & (tbl != tbl.T)
                if viol.any():
                    put("G1", viol)
                    break
            else:
                put("G1", np.zeros((n, n), dtype=bool))
        elif ax == "G2":
            a_grid = np.broadcast_to(ar[:, None], (n, n))
            absorb1 = _apply2(mt, jn, a_grid)  # (a v b) ^ a
            absorb2 = _apply2(jn, mt, a_grid)  # (a ^ b) v a
            viol = ((absorb1 >= 0) & (absorb1 != a_grid)) | (
                (absorb2 >= 0) & (absorb2 != a_grid)
            )
            put("G2", viol)
        elif ax in ("G3", "G4"):
            inner, outer = (mt, jn) if ax == "G3" else (jn, mt)
            # (a inner b) outer c  vs  (a outer c) inner (b outer c)
            ab = inner[:, :, None]
            c_grid = np.broadcast_to(ar[None, None, :], (n, n, n))
            lhs = _apply2(outer, ab, c_grid)
            ac = np.broadcast_to(outer[:, None, :], (n, n, n))
            bc = np.broadcast_to(outer[None, :, :], (n, n, n))
            rhs = _apply2(inner, ac, bc)
            put(ax, (lhs >= 0) & (rhs >= 0) & (lhs != rhs))
        elif ax == "G5":
            join_eq = jn == ar[None, :]   # a v b = b (defined and equal)
            meet_eq = mt == ar[:, None]   # a ^ b = a
            put("G5", (le ^ join_eq) | (join_eq ^ meet_eq))
        elif ax in ("UL1", "UL1*"):
            viol = (lo[lo] != lo) | ~p[up, up[up]]
            if ax == "UL1":
                viol = viol | ~p[lo, ar]
            put(ax, viol)
        elif ax == "UL2":
            put("UL2", p & ~(p[np.ix_(lo, lo)] & p[np.ix_(up, up)]))
        elif ax == "UL3":
            ok = (
                lo[sys.bottom] == sys.bottom
                and up[sys.bottom] == sys.bottom
                and p[lo[sys.top], sys.top]
                and p[up[sys.top], sys.top]
            )
            results["UL3"] = AxiomResult(bool(ok), None if ok else (sys.elements[sys.bottom], sys.elements[sys.top]))
        elif ax == "TB":
            viol = ~(p[sys.bottom, :] & p[:, sys.top])
            idx = np.argwhere(viol)
            results["TB"] = AxiomResult(
                not viol.any(), tuple(sys.elements[int(t)] for t in idx[0]) if idx.size else None
            )
        elif ax in ("WRA", "LS", "FU"):
            adm = check_admissible(sys, mixed_depth2=wra_mixed_depth2)
            results[ax] = getattr(adm, ax.lower())
    return MashReport(results)


@dataclass
class AdmissibleReport:
    wra: AxiomResult
    ls: AxiomResult
    fu: AxiomResult

    @property
    def ok(self) -> bool:
        return self.wra.passed and self.ls.passed and self.fu.passed

    def as_dict(self) -> dict:
        return {"WRA": self.wra.passed, "LS": self.ls.passed, "FU": self.fu.passed}


def _join_closure(sys: FinitePartialSystem, seeds: np.ndarray) -> np.ndarray:
    reach = np.zeros(sys.n, dtype=bool)
    reach[seeds] = True
    changed = True
    while changed:
        changed = False
        idx = np.flatnonzero(reach)
        vals = sys.join[np.ix_(idx, idx)]
        vals = vals[vals >= 0]
        new = np.unique(vals)
        fresh = new[~reach[new]]
        if fresh.size:
            reach[fresh] = True
            changed = True
    return reach


def check_admissible(
    sys: FinitePartialSystem,
    granules: Optional[Sequence[int]] = None,
    *,
    mixed_depth2: bool = True,
) -> AdmissibleReport:
    """Check the three granulation admissibility conditions.

    WRA is decided by a sound-but-incomplete term search: iterated joins of
    granules, optionally extended with meets of pairs from that closure
    (needed already to reach the empty set from two disjoint blocks).  LS and
    FU are checked exactly per their definitions; FU demands proper parthood
    below a definite element.
    """
    if granules is None:
        gidx = sys.granule_indices()
    else:
        gidx = np.asarray(sorted(granules), dtype=int)
    n = sys.n
    p = sys.parthood
    lo, up = sys.lower, sys.upper

    if gidx.size == 0:
        missing = AxiomResult(False, ("no granules",))
        return AdmissibleReport(missing, missing, missing)

    reach = _join_closure(sys, gidx)
    if mixed_depth2:
        idx = np.flatnonzero(reach)
        vals = sys.meet[np.ix_(idx, idx)]
        vals = vals[vals >= 0]
        reach = reach.copy()
        reach[np.unique(vals)] = True
    wra_viol = ~(reach[lo] & reach[up])
    wra = AxiomResult(not wra_viol.any(), _first_witness(wra_viol, sys))

    ls_viol = sys.granules[:, None] & p & ~p[:, lo]
    ls = AxiomResult(not ls_viol.any(), _first_witness(ls_viol, sys))

    proper = p & ~p.T
    ar = np.arange(n)
    definite = (lo == ar) & (up == ar)
    fu_ok = True
    fu_witness = None
    for gx in gidx:
        for ga in gidx:
            if not (proper[gx] & proper[ga] & definite).any():
                fu_ok = False
                fu_witness = (sys.elements[int(gx)], sys.elements[int(ga)])
                break
        if not fu_ok:
            break
    fu = AxiomResult(fu_ok, fu_witness)
    return AdmissibleReport(wra, ls, fu)


@dataclass(frozen=True)
class GranuleOperator:
    """A self-determining operator on subsets of a finite universe."""

    name: str
    apply: Callable[[frozenset], frozenset]

    def __call__(self, e: frozenset) -> frozenset:
        return self.apply(e)


def identity_operator() -> GranuleOperator:
    return GranuleOperator(name="identity", apply=lambda e: frozenset(e))


def ball_refinement_operator(ds: Dataset, distance: DistanceFn = None) -> GranuleOperator:
    """Recompute the seed's ball (mean center, max radius) and collect covered points.

    Every input set is contained in its image, so trajectories grow
    monotonically and stabilize within |universe| steps.
    """
    fn = distance if distance is not None else euclidean()

    def apply(e: frozenset) -> frozenset:
        if not e:
            return frozenset()
        idx = np.array(sorted(int(i) for i in e), dtype=int)
        pts = ds.points[idx]
        center = pts.mean(axis=0)
        dists = np.array([float(fn.eval(row, center)) for row in pts])
        radius = float(dists.max())
        all_d = np.array([float(fn.eval(row, center)) for row in ds.points])
        return frozenset(int(i) for i in np.flatnonzero(all_d <= radius))

    return GranuleOperator(name="ball-refinement", apply=apply)


def iterate_to_fixpoint(
    op: GranuleOperator, e: frozenset, max_n: int
) -> tuple[int, frozenset]:
    """Least n >= 1 with op^{n+1}(E) = op^n(E), plus the stabilized set.

    Raises :class:`DivergenceError` (carrying the trajectory) when no
    stabilization shows up within max_n applications.
    """
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    e = frozenset(e)
    trajectory = [e]
    current = op(e)
    trajectory.append(current)
    for n in range(1, max_n + 1):
        nxt = op(current)
        trajectory.append(nxt)
        if nxt == current:
            return n, current
        current = nxt
    raise DivergenceError(
        f"no fixed point within {max_n} applications of {op.name}", trajectory
    )


def is_existential_granule(
    g: frozenset,
    op: GranuleOperator,
    universe: Sequence,
    *,
    max_subsets: int = 2**20,
    seeds: Optional[Sequence[frozenset]] = None,
    max_n: Optional[int] = None,
) -> bool:
    """True iff some subset of G stabilizes under the operator to exactly G."""
    g = frozenset(g)
    limit = max_n if max_n is not None else max(len(universe), 1) + 1
    if seeds is None:
        if 2 ** len(g) > max_subsets:
            raise BudgetError(
                f"2^{len(g)} seed subsets exceed the budget; supply candidate seeds"
            )
        ordered = sorted(g)
        candidates = [g] + [
            frozenset(ordered[b] for b in range(len(ordered)) if mask >> b & 1)
            for mask in range(2 ** len(ordered) - 1)
        ]
    else:
        candidates = [frozenset(s) for s in seeds]
    for e in candidates:
        if not e <= g:
            continue
        try:
            _, limit_set = iterate_to_fixpoint(op, e, limit)
        except DivergenceError:
            continue
        if limit_set == g:
            return True
    return False


@dataclass
class EggsReport:
    g1: Optional[bool]
    g2: Optional[bool]
    indeterminate: bool
    witness: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return bool(self.g1) and bool(self.g2) and not self.indeterminate


def check_eggs(
    sys: FinitePartialSystem,
    op: GranuleOperator,
    *,
    budget: int = 2**20,
    max_n: Optional[int] = None,
) -> EggsReport:
    """Existential-variant conditions: flags match stabilized images, all trajectories stabilize.

    Universe elements must be subsets (frozensets) of the top element; the
    operator acts on subsets of top.  Exceeding the enumeration budget yields
    an indeterminate report rather than a silent verdict.
    """
    base = sys.elements[sys.top]
    if not isinstance(base, frozenset):
        raise TypeError("eggs checking needs subset-valued universe elements")
    if 2 ** len(base) > budget:
        return EggsReport(g1=None, g2=None, indeterminate=True)
    members = sorted(base)
    limit = max_n if max_n is not None else len(base) + 1
    images = set()
    for mask in range(2 ** len(members)):
        e = frozenset(members[b] for b in range(len(members)) if mask >> b & 1)
        try:
            _, stable = iterate_to_fixpoint(op, e, limit)
        except DivergenceError:
            return EggsReport(g1=None, g2=False, indeterminate=False, witness=(e,))
        images.add(stable)
    g1 = True
    witness = None
    for i, el in enumerate(sys.elements):
        if not isinstance(el, frozenset):
            raise TypeError("eggs checking needs subset-valued universe elements")
        flagged = bool(sys.granules[i])
        if flagged != (el in images):
            g1 = False
            witness = (el,)
            break
    return EggsReport(g1=g1, g2=True, indeterminate=False, witness=witness)


def build_set_hgos(universe_set: Sequence, granulation: Sequence[Sequence]) -> FinitePartialSystem:
    """Powerset system with union/meet as the lattice operations.

    ``granulation`` must cover the universe set (partition or cover).  Lower
    approximation of x is the union of granules inside x, upper the union of
    granules meeting x; bottom is the empty set, top the universe set, and
    the granule flags mark the granulation.
    """
    base = sorted(universe_set)
    if len(base) > 10:
        raise BudgetError("powerset construction capped at 10 base elements")
    blocks = [frozenset(b) for b in granulation]
    covered = frozenset().union(*blocks) if blocks else frozenset()
    if covered != frozenset(base):
        raise StructureError("granulation does not cover the universe set")
    elements = [
        frozenset(base[b] for b in range(len(base)) if mask >> b & 1)
        for mask in range(2 ** len(base))
    ]
    pos = {el: i for i, el in enumerate(elements)}
    n = len(elements)
    subset = np.zeros((n, n), dtype=bool)
    join = np.empty((n, n), dtype=int)
    meet = np.empty((n, n), dtype=int)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            subset[i, j] = a <= b
            join[i, j] = pos[a | b]
            meet[i, j] = pos[a & b]
    lower = np.empty(n, dtype=int)
    upper = np.empty(n, dtype=int)
    for i, a in enumerate(elements):
        lower[i] = pos[frozenset().union(*(g for g in blocks if g <= a)) if any(g <= a for g in blocks) else frozenset()]
        upper[i] = pos[frozenset().union(*(g for g in blocks if g & a)) if any(g & a for g in blocks) else frozenset()]
    granules = np.zeros(n, dtype=bool)
    for g in blocks:
        granules[pos[g]] = True
    return FinitePartialSystem(
        elements=elements,
        parthood=subset,
        order=subset.copy(),
        join=join,
        meet=meet,
        lower=lower,
        upper=upper,
        bottom=pos[frozenset()],
        top=pos[frozenset(base)],
        granules=granules,
    )


# ---------------------------------------------------------------------------
# plain-text system files


def _render_element(el) -> str:
    if isinstance(el, frozenset):
        return "{" + ",".join(str(x) for x in sorted(el)) + "}"
    return str(el)


def format_system_file(sys: FinitePartialSystem) -> str:
    """Serialize a system to the tabular text format (see parse_system_file)."""
    names = [_render_element(e) for e in sys.elements]
    lines = ["universe: " + " ".join(names)]
    lines.append("bottom: " + names[sys.bottom])
    lines.append("top: " + names[sys.top])
    gn = [names[i] for i in sys.granule_indices()]
    if gn:
        lines.append("granules: " + " ".join(gn))
    for label, table in (("parthood", sys.parthood), ("order", sys.order)):
        lines.append(label + ":")
        for row in table.astype(int):
            lines.append(" ".join(str(v) for v in row))
    for label, table in (("join", sys.join), ("meet", sys.meet)):
        lines.append(label + ":")
        for row in table:
            lines.append(" ".join("-" if v == UNDEFINED else names[v] for v in row))
    lines.append("lower: " + " ".join(names[v] for v in sys.lower))
    lines.append("upper: " + " ".join(names[v] for v in sys.upper))
    return "\n".join(lines) + "\n"


def parse_system_file(text: str) -> FinitePartialSystem:
    """Parse the plain-text tabular system format.

    Sections: ``universe:``, ``bottom:``, ``top:``, optional ``granules:``,
    then ``parthood:`` and ``order:`` as 0/1 grids and ``join:``/``meet:`` as
    element-name grids with ``-`` for undefined entries, and ``lower:`` /
    ``upper:`` as single rows of element names.  ``#`` starts a comment.
    """
    lines = [(no + 1, ln.split("#", 1)[0].rstrip()) for no, ln in enumerate(text.splitlines())]
    lines = [(no, ln) for no, ln in lines if ln.strip()]
    names: list[str] = []
    name_pos: dict[str, int] = {}
    bottom = top = None
    gran_names: list[str] = []
    matrices: dict[str, list[list[str]]] = {}
    unary: dict[str, list[str]] = {}
    pending = None
    for no, ln in lines:
        stripped = ln.strip()
        key = stripped.split(":", 1)[0].lower() if ":" in stripped else None
        if key in ("universe", "bottom", "top", "granules", "lower", "upper"):
            value = stripped.split(":", 1)[1].strip()
            pending = None
            if key == "universe":
                names = value.split()
                if len(set(names)) != len(names):
                    raise StructureError(f"line {no}: duplicate universe names")
                name_pos = {nm: i for i, nm in enumerate(names)}
            elif key == "bottom":
                bottom = value
            elif key == "top":
                top = value
            elif key == "granules":
                gran_names = value.split()
            else:
                unary[key] = value.split()
        elif key in ("parthood", "order", "join", "meet"):
            pending = key
            matrices[pending] = []
        elif pending is not None:
            matrices[pending].append(stripped.split())
        else:
            raise StructureError(f"line {no}: unexpected content {stripped!r}")
    if not names:
        raise StructureError("missing universe section")
    n = len(names)

    def need(section):
        if section not in matrices or len(matrices[section]) != n:
            raise StructureError(f"section {section!r} must have {n} rows")
        for row in matrices[section]:
            if len(row) != n:
                raise StructureError(f"section {section!r} has a ragged row")
        return matrices[section]

    def to_index(token, where):
        if token not in name_pos:
            raise StructureError(f"{where}: unknown element {token!r}")
        return name_pos[token]

    def bool_grid(section):
        rows = need(section)
        out = np.zeros((n, n), dtype=bool)
        for i, row in enumerate(rows):
            for j, tok in enumerate(row):
                if tok not in ("0", "1"):
                    raise StructureError(f"section {section!r}: entries must be 0/1, got {tok!r}")
                out[i, j] = tok == "1"
        return out

    def op_grid(section):
        rows = need(section)
        out = np.full((n, n), UNDEFINED, dtype=int)
        for i, row in enumerate(rows):
            for j, tok in enumerate(row):
                if tok != "-":
                    out[i, j] = to_index(tok, f"section {section!r}")
        return out

    def unary_row(section):
        if section not in unary:
            raise StructureError(f"missing section {section!r}")
        row = unary[section]
        if len(row) != n:
            raise StructureError(f"section {section!r} must list {n} values")
        return np.array([to_index(tok, f"section {section!r}") for tok in row], dtype=int)

    if bottom is None or top is None:
        raise StructureError("missing bottom/top declarations")
    granules = np.zeros(n, dtype=bool)
    for gname in gran_names:
        granules[to_index(gname, "granules")] = True
    return FinitePartialSystem(
        elements=list(names),
        parthood=bool_grid("parthood"),
        order=bool_grid("order"),
        join=op_grid("join"),
        meet=op_grid("meet"),
        lower=unary_row("lower"),
        upper=unary_row("upper"),
        bottom=to_index(bottom, "bottom"),
        top=to_index(top, "top"),
        granules=granules,
    )
