"""Entry laws and sampling for real and complex sample covariance ensembles.

Every built-in law is centred, symmetric and has unit variance (E|x|^2 = 1 in
the complex case unless the Wishart convention is requested). Sampling uses a
counter-based Philox generator; replica ``i`` of an experiment with master seed
``s`` is sampled from ``derive_seed(s, i)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Optional

import numpy as np


class Family(str, enum.Enum):
    GAUSSIAN_REAL = "gaussian_real"
    GAUSSIAN_COMPLEX = "gaussian_complex"
    RADEMACHER = "rademacher"
    SYMMETRIC_UNIFORM = "symmetric_uniform"
    DISCRETE = "discrete"


class Field(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"


# E|x|^2 = 1 (default) or Re, Im ~ N(0, 1) so that E|x|^2 = 2
UNIT = "unit"
WISHART = "wishart"


def _exact(v):
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    return float(v)


@dataclass(frozen=True)
class EntryDistribution:
    """Law of a single matrix entry.

    For ``Family.DISCRETE`` the raw ``values`` are rescaled to unit variance;
    ``weights`` are normalised to sum to one. Values and weights given as
    ints, Fractions or fraction strings keep the moments exact.
    """

    family: Family
    values: tuple = ()
    weights: tuple = ()
    convention: str = UNIT

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.convention not in (UNIT, WISHART):
            raise ValueError(f"unknown complex convention {self.convention!r}")
        if self.family is Family.DISCRETE:
            if len(self.values) == 0 or len(self.values) != len(self.weights):
                raise ValueError("discrete law needs matching values and weights")
            vals = tuple(_exact(v) for v in self.values)
            wts = tuple(_exact(w) for w in self.weights)
            if any(w <= 0 for w in wts):
                raise ValueError("discrete weights must be positive")
            total = sum(wts)
            wts = tuple(w / total for w in wts)
            if sum(w * v * v for v, w in zip(vals, wts)) == 0:
                raise ValueError("discrete law is degenerate at 0")
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "weights", wts)
        elif self.values or self.weights:
            raise ValueError(f"{self.family.value} takes no values/weights")

    @classmethod
    def gaussian_real(cls):
        return cls(Family.GAUSSIAN_REAL)

    @classmethod
    def gaussian_complex(cls, convention=UNIT):
        return cls(Family.GAUSSIAN_COMPLEX, convention=convention)

    @classmethod
    def rademacher(cls):
        return cls(Family.RADEMACHER)

    @classmethod
    def symmetric_uniform(cls):
        return cls(Family.SYMMETRIC_UNIFORM)

    @classmethod
    def discrete(cls, values, weights):
        return cls(Family.DISCRETE, tuple(values), tuple(weights))

    @property
    def is_complex(self):
        return self.family is Family.GAUSSIAN_COMPLEX

    def _raw_second_moment(self):
        return sum(w * v * v for v, w in zip(self.values, self.weights))

    def scaled_values(self):
        """Support points after rescaling to unit variance (floats)."""
        scale = math.sqrt(float(self._raw_second_moment()))
        return np.array([float(v) / scale for v in self.values])

    def to_config(self):
        out = {"family": self.family.value}
        if self.family is Family.DISCRETE:
            out["values"] = ",".join(str(v) for v in self.values)
            out["weights"] = ",".join(str(w) for w in self.weights)
        if self.family is Family.GAUSSIAN_COMPLEX:
            out["convention"] = self.convention
        return out

    @classmethod
    def from_config(cls, cfg):
        try:
            family = Family(cfg["family"])
        except ValueError:
            known = ", ".join(f.value for f in Family)
            raise ValueError(f"family: unknown value {cfg['family']!r} (expected one of {known})")
        if family is Family.DISCRETE:
            values = [s.strip() for s in cfg["values"].split(",")]
            weights = [s.strip() for s in cfg["weights"].split(",")]
            return cls.discrete(values, weights)
        return cls(family, convention=cfg.get("convention", UNIT))


def _double_factorial(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def entry_moment(dist: EntryDistribution, k: int):
    """E x^k for real laws, exact (int/Fraction) whenever the law allows it.

    Complex laws have E x^k = 0 for every k >= 1; for them the even-order
    *absolute* moments E|x|^k are returned instead (odd k gives 0), which is
    what the trace-moment combinatorics consume.
    """
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError(f"moment order must be a non-negative integer, got {k!r}")
    k = int(k)
    if k == 0:
        return 1
    fam = dist.family
    if fam is Family.DISCRETE:
        vals, wts = dist.values, dist.weights
        var = dist._raw_second_moment()
        raw = sum(w * v ** k for v, w in zip(vals, wts))
        if k % 2 == 0:
            out = raw / var ** (k // 2)
            return out if isinstance(out, Fraction) else float(out)
        if raw == 0:
            return 0
        return float(raw) / float(var) ** (k / 2)
    if k % 2 == 1:
        return 0
    if fam is Family.GAUSSIAN_REAL:
        return _double_factorial(k - 1)
    if fam is Family.RADEMACHER:
        return 1
    if fam is Family.SYMMETRIC_UNIFORM:
        return Fraction(3 ** (k // 2), k + 1)
    if fam is Family.GAUSSIAN_COMPLEX:
        half = k // 2
        scale = 2 ** half if dist.convention == WISHART else 1
        return math.factorial(half) * scale
    raise ValueError(f"no closed-form moments for {fam}")


@dataclass
class ConditionsReport:
    """Moment and symmetry diagnostics for an entry law."""

    even_moments: list
    c_values: list  # running minimal C with E x^{2m} <= (C m)^m
    mean_zero: bool
    unit_variance: bool
    symmetric: bool

    @property
    def constant(self):
        return self.c_values[-1]

    @property
    def passed(self):
        return self.mean_zero and self.unit_variance and self.symmetric


def _is_symmetric(dist):
    if dist.family is not Family.DISCRETE:
        return True
    mass = {}
    for v, w in zip(dist.values, dist.weights):
        mass[v] = mass.get(v, 0) + w
    for v, w in mass.items():
        other = mass.get(-v)
        if other is None:
            return False
        if isinstance(w, Fraction) and isinstance(other, Fraction):
            if w != other:
                return False
        elif not math.isclose(float(w), float(other), rel_tol=1e-12, abs_tol=1e-15):
            return False
    return True


def validate_conditions(dist: EntryDistribution, m_max: int) -> ConditionsReport:
    """Check centring, normalisation, symmetry and the subgaussian moment bound."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    moments, cs = [], []
    running = 0.0
    for m in range(1, m_max + 1):
        mom = entry_moment(dist, 2 * m)
        moments.append(mom)
        running = max(running, float(mom) ** (1.0 / m) / m)
        cs.append(running)
    mean = entry_moment(dist, 1) if dist.family is not Family.DISCRETE else \
        sum(w * v for v, w in zip(dist.values, dist.weights))
    second = entry_moment(dist, 2)
    if dist.is_complex and dist.convention == WISHART:
        unit = False
    else:
        unit = second == 1 or math.isclose(float(second), 1.0, rel_tol=1e-12)
    return ConditionsReport(
        even_moments=moments,
        c_values=cs,
        mean_zero=(mean == 0) or abs(float(mean)) < 1e-12,
        unit_variance=unit,
        symmetric=_is_symmetric(dist),
    )


@dataclass(frozen=True)
class EnsembleSpec:
    entry: EntryDistribution
    n: int
    p: int
    field: Optional[Field] = None

    def __post_init__(self):
        for name in ("n", "p"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, (int, np.integer)) or val < 1:
                raise ValueError(f"{name} must be a positive integer, got {val!r}")
            object.__setattr__(self, name, int(val))
        fld = self.field
        if fld is None:
            fld = Field.COMPLEX if self.entry.is_complex else Field.REAL
        fld = Field(fld)
        if self.entry.is_complex and fld is Field.REAL:
            raise ValueError("complex Gaussian entries need the complex field")
        object.__setattr__(self, "field", fld)

    @property
    def is_complex(self):
        return self.field is Field.COMPLEX

    def to_config(self):
        out = dict(self.entry.to_config())
        out.update(n=str(self.n), p=str(self.p), field=self.field.value)
        return out

    @classmethod
    def from_config(cls, cfg):
        entry = EntryDistribution.from_config(cfg)
        fld = cfg.get("field")
        return cls(entry, int(cfg["n"]), int(cfg["p"]), Field(fld) if fld else None)


@dataclass(frozen=True)
class MatrixSample:
    entries: np.ndarray = field(repr=False)
    spec: EnsembleSpec
    seed: int


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed of replica ``index``: SeedSequence([master_seed, index]) state word."""
    ss = np.random.SeedSequence([int(master_seed) & (2**64 - 1), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))


def _draw_real(dist, rng, shape):
    fam = dist.family
    if fam is Family.GAUSSIAN_REAL or fam is Family.GAUSSIAN_COMPLEX:
        return rng.standard_normal(shape)
    if fam is Family.RADEMACHER:
        return rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0
    if fam is Family.SYMMETRIC_UNIFORM:
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=shape)
    vals = dist.scaled_values()
    probs = np.array([float(w) for w in dist.weights])
    return vals[rng.choice(len(vals), size=shape, p=probs)]


def sample_matrix(spec: EnsembleSpec, seed: int) -> MatrixSample:
    """n x p matrix of i.i.d. entries; a pure function of (spec, seed)."""
    rng = make_rng(seed)
    shape = (spec.n, spec.p)
    dist = spec.entry
    if not spec.is_complex:
        x = _draw_real(dist, rng, shape)
    else:
        re = _draw_real(dist, rng, shape)
        im = _draw_real(dist, rng, shape)
        scale = 1.0 if (dist.is_complex and dist.convention == WISHART) else math.sqrt(0.5)
        x = (re + 1j * im) * scale
    return MatrixSample(entries=x, spec=spec, seed=int(seed))
