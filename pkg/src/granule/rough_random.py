"""Approximation spaces, rough objects, and rough-random function wrappers.

An :class:`ApproxSpace` is a finite universe with arbitrary lower/upper
subset maps; six minimal axioms (nesting, lower idempotence, monotonicity of
both maps, bottom/top normalization) are checked by powerset exhaustion on
small universes.  From a space come the approximation collection, the rough
pairs and the xi maps into them, all wrapped as typed partial functions whose
domain/codomain discipline is machine-checked.  A clustering run can be
replayed as a sequence of partition-induced spaces with a total map from each
iteration's approximations onto the next iteration's clusters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .ball_kmeans import BkmConfig, Dataset, run
from .existential import BudgetError

__all__ = [
    "ApproxSpace",
    "RoughPair",
    "CrrfKind",
    "CrrfWrapper",
    "CrrfValidation",
    "Constraint",
    "SpaceAxiomReport",
    "Crrf3TraceEntry",
    "pawlak_space",
    "check_approx_axioms",
    "approximation_set",
    "e1_pairs",
    "f_objects",
    "e2_objects",
    "xi_functions",
    "xi5",
    "bkm_crrf3_trace",
]

EXHAUSTIVE_LIMIT = 12


@dataclass
class ApproxSpace:
    """Finite universe with lower and upper approximation maps on subsets."""

    universe: tuple
    lower: Callable[[frozenset], frozenset]
    upper: Callable[[frozenset], frozenset]
    blocks: Optional[tuple] = None  # set when induced by a partition

    def __post_init__(self):
        self.universe = tuple(self.universe)
        self._memo: dict = {}

    def approx(self, x: frozenset) -> tuple[frozenset, frozenset]:
        x = frozenset(x)
        hit = self._memo.get(x)
        if hit is None:
            hit = (frozenset(self.lower(x)), frozenset(self.upper(x)))
            self._memo[x] = hit
        return hit

    def subset_order(self, x: frozenset) -> tuple:
        """Canonical sort key: bitmask over the universe order."""
        pos = {el: i for i, el in enumerate(self.universe)}
        return (sum(1 << pos[el] for el in x),)


def pawlak_space(universe: Sequence, blocks: Sequence[Sequence]) -> ApproxSpace:
    """Partition-induced space: lower/upper are unions of blocks inside/meeting x."""
    uni = tuple(universe)
    bl = tuple(frozenset(b) for b in blocks)
    seen: set = set()
    for b in bl:
        if not b:
            raise ValueError("partition blocks must be non-empty")
        if b & seen:
            raise ValueError("partition blocks must be disjoint")
        seen |= b
    if seen != set(uni):
        raise ValueError("partition must cover the universe")

    def lower(x: frozenset) -> frozenset:
        return frozenset().union(*(b for b in bl if b <= x)) if any(b <= x for b in bl) else frozenset()

    def upper(x: frozenset) -> frozenset:
        return frozenset().union(*(b for b in bl if b & x)) if any(b & x for b in bl) else frozenset()

    return ApproxSpace(universe=uni, lower=lower, upper=upper, blocks=bl)


def _subsets(universe: Sequence):
    members = list(universe)
    for mask in range(2 ** len(members)):
        yield frozenset(members[b] for b in range(len(members)) if mask >> b & 1)


@dataclass
class SpaceAxiomReport:
    """Per-axiom outcome (passed, witness); sampled=True marks non-exhaustive runs."""

    results: dict
    sampled: bool = False

    @property
    def ok(self) -> bool:
        return all(passed for passed, _ in self.results.values())

    def failed(self) -> list[str]:
        return sorted(name for name, (passed, _) in self.results.items() if not passed)


AXIOM_NAMES = ("int-cl", "l-id", "l-mo", "u-mo", "l-bot", "u-top")


def check_approx_axioms(
    space: ApproxSpace,
    *,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    samples: int = 512,
    seed: int = 0,
) -> SpaceAxiomReport:
    """Verify the six minimal approximation axioms.

    Exhaustive over the powerset (and all nested pairs for monotonicity) up
    to ``exhaustive_limit`` universe elements; beyond that a seeded sample of
    subsets and nested pairs is used and the report is flagged as sampled.
    """
    uni = space.universe
    full = frozenset(uni)
    sampled = len(uni) > exhaustive_limit
    if sampled:
        rng = np.random.default_rng(seed)
        pool = []
        for _ in range(samples):
            mask = rng.integers(0, 2, size=len(uni)).astype(bool)
            pool.append(frozenset(np.asarray(uni, dtype=object)[mask]))
        pairs = []
        for x in pool:
            sub_mask = rng.integers(0, 2, size=len(uni)).astype(bool)
            a = frozenset(e for i, e in enumerate(uni) if sub_mask[i] and e in x)
            pairs.append((a, x))
    else:
        pool = list(_subsets(uni))
        pairs = []
        for b in pool:
            items = sorted(b)
            for mask in range(2 ** len(items)):
                a = frozenset(items[i] for i in range(len(items)) if mask >> i & 1)
                pairs.append((a, b))

    results: dict = {}
    int_cl = l_id = (True, None)
    for x in pool:
        lx, ux = space.approx(x)
        if int_cl[0] and not lx <= ux:
            int_cl = (False, (x,))
        llx, _ = space.approx(lx)
        if l_id[0] and not llx <= lx:
            l_id = (False, (x,))
    results["int-cl"] = int_cl
    results["l-id"] = l_id

    l_mo = u_mo = (True, None)
    for a, b in pairs:
        la, ua = space.approx(a)
        lb, ub = space.approx(b)
        if l_mo[0] and not la <= lb:
            l_mo = (False, (a, b))
        if u_mo[0] and not ua <= ub:
            u_mo = (False, (a, b))
    results["l-mo"] = l_mo
    results["u-mo"] = u_mo

    lbot, _ = space.approx(frozenset())
    results["l-bot"] = (lbot == frozenset(), None if lbot == frozenset() else (frozenset(),))
    _, utop = space.approx(full)
    results["u-top"] = (utop == full, None if utop == full else (full,))
    return SpaceAxiomReport(results=results, sampled=sampled)


def approximation_set(space: ApproxSpace, *, exhaustive_limit: int = 14) -> list[frozenset]:
    """All lower and upper approximation images, canonically ordered.

    Partition-induced spaces fall back to block unions when the universe is
    too large to exhaust; anything else past the limit raises BudgetError.
    """
    if len(space.universe) <= exhaustive_limit:
        out = set()
        for x in _subsets(space.universe):
            lx, ux = space.approx(x)
            out.add(lx)
            out.add(ux)
    elif space.blocks is not None:
        out = set()
        for mask in range(2 ** len(space.blocks)):
            out.add(
                frozenset().union(
                    *(space.blocks[b] for b in range(len(space.blocks)) if mask >> b & 1)
                )
                if mask
                else frozenset()
            )
    else:
        raise BudgetError(
            f"universe of size {len(space.universe)} exceeds the exhaustion limit"
        )
    return sorted(out, key=space.subset_order)


@dataclass(frozen=True)
class RoughPair:
    """A rough object as a pair of approximations (lower part, upper part)."""

    lower_part: frozenset
    upper_part: frozenset

    @property
    def is_nested(self) -> bool:
        return self.lower_part <= self.upper_part


def e1_pairs(space: ApproxSpace, *, exhaustive_limit: int = 14) -> list[RoughPair]:
    """The rough pairs (x^l, x^u) over all subsets, deduplicated, canonical order."""
    if len(space.universe) > exhaustive_limit:
        raise BudgetError("rough-pair enumeration needs an exhaustible universe")
    seen = set()
    for x in _subsets(space.universe):
        lx, ux = space.approx(x)
        seen.add((lx, ux))
    key = lambda p: (space.subset_order(p[0]), space.subset_order(p[1]))
    return [RoughPair(lower_part=a, upper_part=b) for a, b in sorted(seen, key=key)]


def f_objects(space: ApproxSpace, *, exhaustive_limit: int = 14) -> list[frozenset]:
    """Subsets that are not an approximation of anything (the non-definable leftovers)."""
    a_tau = set(approximation_set(space, exhaustive_limit=exhaustive_limit))
    return sorted(
        (x for x in _subsets(space.universe) if x not in a_tau), key=space.subset_order
    )


def e2_objects(space: ApproxSpace, *, exhaustive_limit: int = 14) -> list[frozenset]:
    """Upper-closed subsets: x with x^u = x."""
    if len(space.universe) > exhaustive_limit:
        raise BudgetError("enumeration needs an exhaustible universe")
    return sorted(
        (x for x in _subsets(space.universe) if space.approx(x)[1] == x),
        key=space.subset_order,
    )


class CrrfKind(enum.Enum):
    TYPE1 = "type-1"
    TYPE2 = "type-2"
    TYPE3 = "type-3"
    TYPEH = "type-H"


class Constraint(enum.Enum):
    NONE = "none"
    MINIMAL_COVER = "minimal-cover"


@dataclass
class CrrfValidation:
    domain_ok: bool
    codomain_ok: bool
    total: bool
    defined_points: int
    undefined_points: int

    @property
    def ok(self) -> bool:
        return self.domain_ok and self.codomain_ok


@dataclass
class CrrfWrapper:
    """A typed (partial) map between rough-object collections.

    Type-1 maps approximations to rough objects and may be partial; type-2
    maps (approximation, subset) pairs to reals and must be total, as must
    type-3 (approximations to arbitrary objects).  Type-H maps (operator tag,
    subset) pairs to rough objects.  ``func`` returns None where undefined.
    """

    kind: CrrfKind
    domain: tuple
    func: Callable
    codomain: Optional[tuple] = None
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def apply(self, x):
        return self.func(x)

    def validate(self, a_tau: Optional[Sequence] = None) -> CrrfValidation:
        domain_ok = True
        if self.kind in (CrrfKind.TYPE1, CrrfKind.TYPE3) and a_tau is not None:
            domain_ok = set(self.domain) <= set(a_tau)
        defined = undefined = 0
        codomain_ok = True
        for x in self.domain:
            val = self.func(x)
            if val is None:
                undefined += 1
                continue
            defined += 1
            if self.codomain is not None and val not in set(self.codomain):
                codomain_ok = False
        total = undefined == 0
        if self.kind in (CrrfKind.TYPE2, CrrfKind.TYPE3) and not total:
            codomain_ok = codomain_ok and False
        return CrrfValidation(
            domain_ok=domain_ok,
            codomain_ok=codomain_ok,
            total=total,
            defined_points=defined,
            undefined_points=undefined,
        )


def xi_functions(
    space: ApproxSpace, variant: int, constraint: Constraint = Constraint.NONE
) -> CrrfWrapper:
    """The three canonical type-1 maps from approximations into rough pairs.

    Variant 1 sends a to the first pair (a, b^u); variant 2 to the first pair
    (b^l, a); variant 3 to the first pair touching a in either component.
    "First" is the canonical bitmask order, which makes the for-some-b choice
    deterministic.  Under the minimal-cover constraint, candidates are the
    pairs (e, f) with e <= a <= f (component shape kept for variants 1 and 2)
    and an inclusion-minimal one is chosen; where no candidate exists the map
    is undefined at that point.
    """
    if variant not in (1, 2, 3):
        raise ValueError("variant must be 1, 2 or 3")
    a_tau = tuple(approximation_set(space))
    pairs = e1_pairs(space)

    def candidates(a: frozenset) -> list[RoughPair]:
        if constraint is Constraint.MINIMAL_COVER:
            pool = [p for p in pairs if p.lower_part <= a <= p.upper_part]
            if variant == 1:
                pool = [p for p in pool if p.lower_part == a]
            elif variant == 2:
                pool = [p for p in pool if p.upper_part == a]
            minimal = [
                p
                for p in pool
                if not any(
                    q is not p
                    and q.lower_part <= p.lower_part
                    and q.upper_part <= p.upper_part
                    and (q.lower_part, q.upper_part) != (p.lower_part, p.upper_part)
                    for q in pool
                )
            ]
            return minimal
        if variant == 1:
            return [p for p in pairs if p.lower_part == a]
        if variant == 2:
            return [p for p in pairs if p.upper_part == a]
        return [p for p in pairs if p.lower_part == a or p.upper_part == a]

    def func(a: frozenset) -> Optional[RoughPair]:
        cand = candidates(frozenset(a))
        return cand[0] if cand else None

    return CrrfWrapper(
        kind=CrrfKind.TYPE1,
        domain=a_tau,
        func=func,
        codomain=tuple(pairs),
        label=f"xi{variant}",
        metadata={"constraint": constraint.value},
    )


def xi5(a: frozenset, b: frozenset) -> float:
    """Relative outer share |b \\ a| / |b|; zero exactly when b is inside a."""
    a = frozenset(a)
    b = frozenset(b)
    if not b:
        raise ValueError("xi5 needs a non-empty second argument")
    return len(b - a) / len(b)


@dataclass
class Crrf3TraceEntry:
    """One clustering iteration viewed as a map out of the induced space."""

    iteration: int
    partition: tuple
    space: ApproxSpace
    crrf: CrrfWrapper
    fixed_point: bool
    metadata: dict = field(default_factory=dict)


def _partition_blocks(assign: np.ndarray, k: int) -> tuple:
    return tuple(frozenset(int(i) for i in np.flatnonzero(assign == c)) for c in range(k))


def bkm_crrf3_trace(ds: Dataset, cfg: BkmConfig) -> list[Crrf3TraceEntry]:
    """Replay a clustering run as per-iteration spaces with total maps onto the next partition.

    Each entry wraps iteration t's partition as a partition-induced space and
    records the map taking every approximation (a union of t-blocks) to the
    iteration-(t+1) cluster with the largest overlap (ties to the lowest
    cluster index, the empty set to cluster 0).  On a converged run the last
    entry maps the final partition to itself.
    """
    clustering, _ = run(ds, cfg, record_history=True)
    history = clustering.history
    k = cfg.k
    entries = []
    for t in range(len(history) - 1):
        blocks_t = _partition_blocks(history[t], k)
        blocks_next = _partition_blocks(history[t + 1], k)
        space = pawlak_space(range(ds.n), blocks_t)
        a_tau = tuple(approximation_set(space))

        def make_func(blocks_next=blocks_next):
            def func(x: frozenset):
                overlaps = [len(x & b) for b in blocks_next]
                return blocks_next[int(np.argmax(overlaps))]

            return func

        wrapper = CrrfWrapper(
            kind=CrrfKind.TYPE3,
            domain=a_tau,
            func=make_func(),
            codomain=blocks_next,
            label=f"iteration-{t + 1}-update",
            metadata={"formalization": "candidate", "style": "per-iteration partition spaces"},
        )
        entries.append(
            Crrf3TraceEntry(
                iteration=t + 1,
                partition=tuple(tuple(sorted(b)) for b in blocks_t),
                space=space,
                crrf=wrapper,
                fixed_point=bool(np.array_equal(history[t], history[t + 1])),
                metadata={"formalization": "candidate"},
            )
        )
    return entries
