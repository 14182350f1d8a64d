"""Fair-division instances: validation, generators, and serialization.

An instance holds integer-scaled data: the true valuation of agent i for good
g is valuations[i, g] / scale, and the true endowment is endowments[i] / scale.
Storing exact integers (plus the common scale factor) keeps every ratio
comparison and argmax tie exact; ratios like v_i(g)/e_i are scale-free.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction

import numpy as np

INSTANCE_FORMAT = "fairdiv-instance/1"
ALLOCATION_FORMAT = "fairdiv-allocation/1"

# smallest value-to-endowment ratio for which the chain family construction
# works (denominator of its defining inequality stays positive)
CHAIN_MIN_RATIO = Fraction(97, 500)
CHAIN_EPS = Fraction(1, 1000)


def as_fraction(x) -> Fraction:
    """Exact rational from int/Fraction/str, or a float's decimal literal."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(Decimal(str(x)))
    if isinstance(x, str):
        try:
            if "/" in x:
                return Fraction(x)
            return Fraction(Decimal(x))
        except (InvalidOperation, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse rational from {x!r}") from exc
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def _int_array(data, name: str) -> np.ndarray:
    arr = np.asarray(data)
    if arr.dtype.kind == "f":
        rounded = np.rint(arr)
        if not np.array_equal(arr, rounded):
            raise ValueError(f"{name} must be exact integers")
        arr = rounded
    # always copy so the frozen view never aliases caller-owned memory
    out = np.array(arr, dtype=np.int64, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Instance:
    valuations: np.ndarray  # (n, m) int64
    endowments: np.ndarray  # (n,) int64
    scale: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = _int_array(self.valuations, "valuations")
        ends = _int_array(self.endowments, "endowments")
        if vals.ndim != 2:
            raise ValueError("valuations must be a 2-D matrix")
        if ends.ndim != 1:
            raise ValueError("endowments must be a 1-D vector")
        n, m = vals.shape
        if n < 1 or m < 1:
            raise ValueError("instance needs at least one agent and one good")
        if ends.shape[0] != n:
            raise ValueError(
                f"dimension mismatch: {n} valuation rows vs "
                f"{ends.shape[0]} endowments"
            )
        if (vals < 0).any():
            raise ValueError("negative valuation")
        if (ends <= 0).any():
            raise ValueError("non-positive endowment")
        if not isinstance(self.scale, (int, np.integer)) or int(self.scale) < 1:
            raise ValueError("scale must be a positive integer")
        object.__setattr__(self, "valuations", vals)
        object.__setattr__(self, "endowments", ends)
        object.__setattr__(self, "scale", int(self.scale))

    @property
    def n(self) -> int:
        return self.valuations.shape[0]

    @property
    def m(self) -> int:
        return self.valuations.shape[1]

    def row_total(self, i: int) -> int:
        """Scaled total value agent i assigns to all goods."""
        return int(self.valuations[i].sum())

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.scale == other.scale
            and np.array_equal(self.valuations, other.valuations)
            and np.array_equal(self.endowments, other.endowments)
        )

    def __repr__(self):
        return f"Instance(n={self.n}, m={self.m}, scale={self.scale})"


@dataclass(frozen=True, eq=False)
class Allocation:
    """Total assignment: owner[g] is the agent index holding good g."""

    owner: np.ndarray  # (m,) int64

    def __post_init__(self):
        owner = _int_array(self.owner, "owner")
        if owner.ndim != 1:
            raise ValueError("owner must be a 1-D vector")
        if (owner < 0).any():
            raise ValueError("owner indices must be non-negative")
        object.__setattr__(self, "owner", owner)

    @property
    def m(self) -> int:
        return self.owner.shape[0]

    def bundles(self, n: int) -> list[np.ndarray]:
        return [np.flatnonzero(self.owner == i) for i in range(n)]

    def __eq__(self, other):
        if not isinstance(other, Allocation):
            return NotImplemented
        return np.array_equal(self.owner, other.owner)

    def __repr__(self):
        return f"Allocation({self.owner.tolist()})"


def validate_allocation(inst: Instance, alloc: Allocation) -> None:
    if alloc.m != inst.m:
        raise ValueError(
            f"allocation covers {alloc.m} goods but instance has {inst.m}"
        )
    if (alloc.owner >= inst.n).any():
        raise ValueError("owner index out of range")


def bundle_values(inst: Instance, alloc: Allocation) -> np.ndarray:
    """Scaled value each agent assigns to their own bundle, shape (n,)."""
    validate_allocation(inst, alloc)
    out = np.zeros(inst.n, dtype=np.int64)
    np.add.at(out, alloc.owner, inst.valuations[alloc.owner, np.arange(inst.m)])
    return out


def new_instance(valuations, endowments, scale: int = 1, meta: dict | None = None) -> Instance:
    """Validated instance from raw matrices; errors are distinct per violation."""
    return Instance(valuations, endowments, scale, dict(meta or {}))


@dataclass(frozen=True)
class GenConfig:
    n: int
    m: int
    e_max: int
    total_valuation: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if self.e_max < 1:
            raise ValueError("e_max must be at least 1")
        if self.total_valuation < 0:
            raise ValueError("total_valuation must be non-negative")


def random_composition(total: int, parts: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random composition of `total` into `parts` non-negative ints.

    Stars-and-bars bijection: sample a (parts-1)-subset of {1..total+parts-1}
    uniformly and take successive gaps minus one, so every composition is
    equally likely (not merely approximately, as normalizing continuous draws
    would give).
    """
    if parts == 1:
        return np.array([total], dtype=np.int64)
    bars = np.sort(rng.choice(total + parts - 1, size=parts - 1, replace=False)) + 1
    edges = np.concatenate(([0], bars, [total + parts]))
    return (np.diff(edges) - 1).astype(np.int64)


def generate_random(cfg: GenConfig) -> Instance:
    """Endowments i.i.d. uniform on {1..e_max}; each agent's valuation row is a
    uniform random composition of total_valuation into m parts, drawn
    independently per agent. Deterministic given cfg.seed."""
    rng = np.random.default_rng(cfg.seed)
    endowments = rng.integers(1, cfg.e_max + 1, size=cfg.n, dtype=np.int64)
    rows = [random_composition(cfg.total_valuation, cfg.m, rng) for _ in range(cfg.n)]
    meta = {
        "family": "random",
        "n": cfg.n,
        "m": cfg.m,
        "e_max": cfg.e_max,
        "total_valuation": cfg.total_valuation,
        "seed": int(cfg.seed),
    }
    return Instance(np.stack(rows), endowments, 1, meta)


def gen_identical_goods(n: int, eps) -> Instance:
    """n agents, n identical goods all valued 1; endowments 1, then 1+eps.

    The per-good ratio rule funnels every good to the first agent, while
    spreading goods one per agent scores far higher on endowment-aware Nash
    welfare, so the gap between the two solutions grows with n.
    """
    if n < 2:
        raise ValueError("need at least 2 agents")
    f = as_fraction(eps)
    if f <= 0:
        raise ValueError("eps must be positive")
    scale = f.denominator
    a = f.numerator
    vals = np.full((n, n), scale, dtype=np.int64)
    ends = np.full(n, scale + a, dtype=np.int64)
    ends[0] = scale
    meta = {"family": "identical_goods", "n": n, "eps": str(f), "scale": scale}
    return Instance(vals, ends, scale, meta)


def gen_two_good_skew(x, eps) -> Instance:
    """Two agents, two goods: the low-endowment agent values good 1 at x and
    good 2 at eps; the high-endowment agent values good 1 at eps only. The
    goods-only optimum splits the goods, while giving both to the
    low-endowment agent maximizes endowment-aware Nash welfare."""
    fx = as_fraction(x)
    fe = as_fraction(eps)
    if not fx > fe > 0:
        raise ValueError("need x > eps > 0")
    scale = math.lcm(fx.denominator, fe.denominator)
    e_int = int(fe * scale)
    x_int = int(fx * scale)
    vals = np.array([[e_int, 0], [x_int, e_int]], dtype=np.int64)
    ends = np.array([2 * scale, scale], dtype=np.int64)
    meta = {
        "family": "two_good_skew",
        "x": str(fx),
        "eps": str(fe),
        "scale": scale,
    }
    return Instance(vals, ends, scale, meta)


def chain_family_min_n(x) -> int:
    """Smallest agent count for which the chain family's defining inequality
    holds (the goods-only solution then provably misses the z-factor
    approximation of maximum Nash welfare)."""
    fx = as_fraction(x)
    if fx < CHAIN_MIN_RATIO:
        raise ValueError(f"x must be at least {float(CHAIN_MIN_RATIO)}")
    from .welfare import approx_factor

    inv = 1.0 / float(fx)
    eps = float(CHAIN_EPS)
    z = approx_factor(float(fx))
    numer = math.log2(inv + 1 - eps) - math.log2(inv)
    denom = math.log2(inv + 1 - eps) - z * math.log2(inv + eps)
    if denom <= 0:
        raise ValueError(f"x={float(fx)} too small for the construction")
    return max(2, math.floor(numer / denom) + 1)


def gen_chain_family(n: int, x) -> Instance:
    """Chain-structured family: every endowment equals 1/x; agent i values its
    own good at 0.001 and agent i+1 values it at 0.999 (all else 0). Requires
    n past the family's threshold; the max value-to-endowment ratio is exactly
    x, there are exactly 2n-1 nonzero valuations, and the goods-only optimum
    is the diagonal matching."""
    fx = as_fraction(x)
    if fx < CHAIN_MIN_RATIO:
        raise ValueError(f"x must be at least {float(CHAIN_MIN_RATIO)}")
    min_n = chain_family_min_n(fx)
    if n < min_n:
        raise ValueError(f"n below threshold: need n >= {min_n} for x={float(fx)}")
    p, q = fx.numerator, fx.denominator
    scale = CHAIN_EPS.denominator * p
    vals = np.zeros((n, n), dtype=np.int64)
    eps_int = CHAIN_EPS.numerator * p
    for i in range(n):
        vals[i, i] = eps_int
        if i >= 1:
            vals[i, i - 1] = scale - eps_int
    ends = np.full(n, CHAIN_EPS.denominator * q, dtype=np.int64)
    meta = {
        "family": "chain",
        "n": n,
        "x": str(fx),
        "eps": str(CHAIN_EPS),
        "scale": scale,
        "min_n": min_n,
    }
    return Instance(vals, ends, scale, meta)


def gen_cen_suboptimal(n: int, m: int, eps) -> Instance:
    """All valuations equal eps; one agent's endowment is pushed one unit past
    the threshold above which moving any good away from them always improves
    Nash welfare, so the goods-only optimum (which must give them a good when
    m >= n) provably fails to maximize it."""
    if not m >= n >= 2:
        raise ValueError("infeasible parameters: need m >= n >= 2")
    f = as_fraction(eps)
    if f <= 0:
        raise ValueError("infeasible parameters: eps must be positive")
    scale = f.denominator
    a = f.numerator
    vals = np.full((n, m), a, dtype=np.int64)
    ends = np.full(n, scale, dtype=np.int64)
    # threshold for the pair (i=0, j=n-1) with all-eps valuations reduces to
    # (m-1)*eps + e_0; one unit past it
    e_j = (m - 1) * f + 2
    ends[n - 1] = int(e_j * scale)
    meta = {
        "family": "cen_suboptimal",
        "n": n,
        "m": m,
        "eps": str(f),
        "scale": scale,
        "pair": [0, n - 1],
    }
    return Instance(vals, ends, scale, meta)


def serialize(inst: Instance) -> str:
    doc = {
        "format": INSTANCE_FORMAT,
        "n": inst.n,
        "m": inst.m,
        "scale": inst.scale,
        "endowments": inst.endowments.tolist(),
        "valuations": inst.valuations.tolist(),
        "meta": inst.meta,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def parse(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed instance document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("malformed instance document: not an object")
    try:
        vals = doc["valuations"]
        ends = doc["endowments"]
        scale = doc.get("scale", 1)
        meta = doc.get("meta", {})
    except KeyError as exc:
        raise ValueError(f"malformed instance document: missing {exc}") from exc
    inst = Instance(vals, ends, scale, dict(meta))
    if "n" in doc and doc["n"] != inst.n:
        raise ValueError("malformed instance document: n disagrees with matrix")
    if "m" in doc and doc["m"] != inst.m:
        raise ValueError("malformed instance document: m disagrees with matrix")
    return inst


def save_instance(inst: Instance, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize(inst))


def load_instance(path) -> Instance:
    with open(path) as fh:
        return parse(fh.read())


def serialize_allocation(alloc: Allocation, info: dict | None = None) -> str:
    doc = {"format": ALLOCATION_FORMAT, "owner": alloc.owner.tolist()}
    doc.update(info or {})
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def parse_allocation(text: str) -> tuple[Allocation, dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed allocation document: {exc}") from exc
    if not isinstance(doc, dict) or "owner" not in doc:
        raise ValueError("malformed allocation document")
    owner = doc.pop("owner")
    doc.pop("format", None)
    return Allocation(owner), doc


def save_allocation(alloc: Allocation, path, info: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_allocation(alloc, info))


def load_allocation(path) -> tuple[Allocation, dict]:
    with open(path) as fh:
        return parse_allocation(fh.read())
