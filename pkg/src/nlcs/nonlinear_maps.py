"""Catalog and evaluator of vector-valued nonlinear measurement maps.

Every map F sends R^dim to R^dim through component functions f_i.  The
built-in kinds model common measurement nonlinearities:

* ``identity``        -- f(t) = t (linear baseline)
* ``abs``             -- f(t) = |t| (magnitude measurements)
* ``sign``            -- f(t) = sign(t) in {-1, 0, 1} (1-bit measurements)
* ``quantize_afz``    -- away-from-zero quantizer sign(t)*step*ceil(|t|/step);
                         maps t to 0 only at t = 0
* ``quantize_floor``  -- floor quantizer step*floor(t/step); flattens the
                         whole interval [0, step) to 0
* ``sine``            -- f(t) = sin(t), domain the open interval (-pi, pi)
                         by default so f(t) = 0 only at t = 0
* ``square``          -- f(t) = t^2
* ``nonzero_random``  -- the zero vector at 0, otherwise a seeded random
                         vector with every entry nonzero; a deterministic
                         function of (seed, input bits)
* custom              -- caller-supplied component functions

A map can be queried, at a point or over sampled points, for the four
pointwise-linearization requirements, numbered by the matrix class the
linearization lives in:

1. some matrix Y with F(z) = Yz exists (needs F(0) = 0 when z = 0);
2. an invertible Y exists (additionally needs F(z) != 0 for z != 0);
3. an invertible diagonal Y exists (f_i(z) = 0 iff z_i = 0 for every i);
4. a permuted invertible diagonal Y exists (zero counts of F(z) and z match).

Requirement 3 implies 4 implies 2 implies 1 at every point.

Zero tests are exact (0.0) for discrete-valued kinds and tolerance-based
for continuous ones; continuous kinds carry separate input/output
tolerances so that e.g. squaring a barely-nonzero entry is not misread as
a requirement violation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import MapDomainError
from .matrix_core import as_vector, seeded_rng

__all__ = [
    "NonlinearMap",
    "RequirementCheck",
    "identity_map",
    "abs_map",
    "sign_map",
    "quantize_away_from_zero",
    "quantize_floor",
    "sine_map",
    "square_map",
    "nonzero_random_map",
    "custom_map",
    "map_from_spec",
    "evaluate",
    "check_requirement",
    "check_requirement_sampled",
    "sample_domain_points",
]

MAP_KINDS = (
    "identity",
    "abs",
    "sign",
    "quantize_afz",
    "quantize_floor",
    "sine",
    "square",
    "nonzero_random",
    "custom",
)

#: discrete-valued kinds use an exact zero test
_EXACT_ZERO_KINDS = {"sign", "quantize_afz", "quantize_floor"}

#: strongest requirement type each built-in kind satisfies over its whole domain
_NOMINAL_TYPE = {
    "identity": 3,
    "abs": 3,
    "sign": 3,
    "quantize_afz": 3,
    "quantize_floor": 1,
    "sine": 3,
    "square": 3,
    "nonzero_random": 2,
}

_ANALYTIC_TOL = 1e-12


class NonlinearMap:
    """Immutable descriptor of a vector-valued nonlinear map.

    Use the factory functions (``abs_map``, ``sign_map``, ...) rather than
    the constructor.  ``nominal_type`` is the strongest linearization
    requirement the map satisfies over its whole domain (None when unknown,
    e.g. for custom maps without a declared type).
    """

    def __init__(self, kind, dim, *, step=None, seed=None, components=None,
                 elementwise=None, open_domain=True, zero_tol_in=None,
                 zero_tol_out=None, nominal_type=None):
        if kind not in MAP_KINDS:
            raise ValueError(f"unknown map kind {kind!r}; expected one of {MAP_KINDS}")
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.kind = kind
        self.dim = int(dim)
        self.step = step
        self.seed = seed
        self.components = components
        self.open_domain = bool(open_domain)
        if elementwise is None:
            elementwise = kind not in ("nonzero_random", "custom")
        self.elementwise = bool(elementwise)
        if zero_tol_in is None:
            zero_tol_in = 0.0 if kind in _EXACT_ZERO_KINDS else _ANALYTIC_TOL
        if zero_tol_out is None:
            if kind in _EXACT_ZERO_KINDS:
                zero_tol_out = 0.0
            elif kind == "square":
                zero_tol_out = _ANALYTIC_TOL**2  # f scales like the square of the input
            else:
                zero_tol_out = _ANALYTIC_TOL
        self.zero_tol_in = float(zero_tol_in)
        self.zero_tol_out = float(zero_tol_out)
        self.nominal_type = nominal_type

    def __repr__(self):
        return f"NonlinearMap(kind={self.kind!r}, dim={self.dim})"

    def __call__(self, z):
        return evaluate(self, z)


def identity_map(dim: int) -> NonlinearMap:
    return NonlinearMap("identity", dim, nominal_type=_NOMINAL_TYPE["identity"])


def abs_map(dim: int) -> NonlinearMap:
    return NonlinearMap("abs", dim, nominal_type=_NOMINAL_TYPE["abs"])


def sign_map(dim: int) -> NonlinearMap:
    return NonlinearMap("sign", dim, nominal_type=_NOMINAL_TYPE["sign"])


def quantize_away_from_zero(dim: int, step: float) -> NonlinearMap:
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    return NonlinearMap("quantize_afz", dim, step=float(step),
                        nominal_type=_NOMINAL_TYPE["quantize_afz"])


def quantize_floor(dim: int, step: float) -> NonlinearMap:
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    return NonlinearMap("quantize_floor", dim, step=float(step),
                        nominal_type=_NOMINAL_TYPE["quantize_floor"])


def sine_map(dim: int, open_domain: bool = True) -> NonlinearMap:
    """Elementwise sine on (-pi, pi).  ``open_domain=False`` widens the
    domain to the closed interval, where sin(+-pi) = 0 breaks requirement 3;
    the variant exists to demonstrate exactly that boundary failure."""
    return NonlinearMap("sine", dim, open_domain=open_domain,
                        nominal_type=_NOMINAL_TYPE["sine"] if open_domain else None)


def square_map(dim: int) -> NonlinearMap:
    return NonlinearMap("square", dim, nominal_type=_NOMINAL_TYPE["square"])


def nonzero_random_map(dim: int, seed: int) -> NonlinearMap:
    return NonlinearMap("nonzero_random", dim, seed=int(seed),
                        nominal_type=_NOMINAL_TYPE["nonzero_random"])


def custom_map(components, *, elementwise=False, nominal_type=None,
               zero_tol_in=_ANALYTIC_TOL, zero_tol_out=_ANALYTIC_TOL) -> NonlinearMap:
    """Map from a table of component functions, each taking the full input
    vector and returning one float.  ``elementwise=True`` is the caller's
    promise that component i depends only on entry i."""
    components = tuple(components)
    if not components:
        raise ValueError("components table must be nonempty")
    return NonlinearMap("custom", len(components), components=components,
                        elementwise=elementwise, nominal_type=nominal_type,
                        zero_tol_in=zero_tol_in, zero_tol_out=zero_tol_out)


def map_from_spec(spec: dict, dim: int) -> NonlinearMap:
    """Build a map from a config entry {"kind": ..., "step": ..., "seed": ...}."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("map spec must be a dict with a 'kind' key")
    kind = spec["kind"]
    if kind in ("quantize_afz", "quantize_floor"):
        if "step" not in spec:
            raise ValueError(f"map kind {kind!r} requires a 'step' value")
        maker = quantize_away_from_zero if kind == "quantize_afz" else quantize_floor
        return maker(dim, float(spec["step"]))
    if kind == "nonzero_random":
        if "seed" not in spec:
            raise ValueError("map kind 'nonzero_random' requires a 'seed' value")
        return nonzero_random_map(dim, int(spec["seed"]))
    simple = {
        "identity": identity_map,
        "abs": abs_map,
        "sign": sign_map,
        "sine": sine_map,
        "square": square_map,
    }
    if kind not in simple:
        raise ValueError(f"unknown map kind {kind!r} in spec")
    return simple[kind](dim)


def _canonical_bits(z: np.ndarray) -> bytes:
    # fold -0.0 into +0.0 so evaluation is a function of the numeric value
    zc = np.where(z == 0.0, 0.0, z)
    return np.ascontiguousarray(zc, dtype=np.float64).tobytes()


def _nonzero_random_values(F: NonlinearMap, z: np.ndarray) -> np.ndarray:
    digest = hashlib.sha256()
    digest.update(int(F.seed).to_bytes(8, "little"))
    digest.update(_canonical_bits(z))
    rng = np.random.default_rng(int.from_bytes(digest.digest()[:8], "little"))
    vals = rng.standard_normal(F.dim)
    while True:
        small = np.abs(vals) < 1e-6
        if not small.any():
            break
        vals[small] = rng.standard_normal(int(small.sum()))
    return vals


def evaluate(F: NonlinearMap, z, *, check_domain: bool = True) -> np.ndarray:
    """Apply the map to a point of its domain."""
    v = as_vector(z)
    if v.shape[0] != F.dim:
        raise ValueError(f"dimension mismatch: map has dim {F.dim}, input has dim {v.shape[0]}")
    if F.kind == "sine" and check_domain:
        bound = np.pi
        inside = np.all(np.abs(v) < bound) if F.open_domain else np.all(np.abs(v) <= bound)
        if not inside:
            kind = "open" if F.open_domain else "closed"
            raise MapDomainError(
                f"sine input outside the {kind} interval (-pi, pi): max |z_i| = {np.abs(v).max()}"
            )
    if F.kind == "identity":
        out = v.copy()
    elif F.kind == "abs":
        out = np.abs(v)
    elif F.kind == "sign":
        out = np.sign(v)
    elif F.kind == "quantize_afz":
        out = np.sign(v) * F.step * np.ceil(np.abs(v) / F.step)
    elif F.kind == "quantize_floor":
        out = F.step * np.floor(v / F.step)
    elif F.kind == "sine":
        out = np.sin(v)
    elif F.kind == "square":
        out = v * v
    elif F.kind == "nonzero_random":
        out = np.zeros(F.dim) if np.all(v == 0.0) else _nonzero_random_values(F, v)
    else:  # custom
        out = np.array([float(f(v)) for f in F.components])
    if not np.all(np.isfinite(out)):
        raise ValueError(f"map {F.kind!r} produced non-finite output")
    return out


@dataclass
class RequirementCheck:
    """Outcome of testing one linearization requirement; on failure the
    witness point reproduces it."""

    linearization_type: int
    holds: bool
    witness: np.ndarray | None = None


def _zero_masks(F: NonlinearMap, z: np.ndarray, fz: np.ndarray):
    return np.abs(z) <= F.zero_tol_in, np.abs(fz) <= F.zero_tol_out


def check_requirement(F: NonlinearMap, rtype: int, z) -> RequirementCheck:
    """Test one of the four pointwise-linearization requirements at z."""
    if rtype not in (1, 2, 3, 4):
        raise ValueError(f"requirement type must be in 1..4, got {rtype}")
    v = as_vector(z)
    fz = evaluate(F, v)
    z_zero, f_zero = _zero_masks(F, v, fz)
    z_is_zero = bool(z_zero.all())
    f_is_zero = bool(f_zero.all())
    if rtype == 1:
        holds = (not z_is_zero) or f_is_zero
    elif rtype == 2:
        holds = z_is_zero == f_is_zero
    elif rtype == 3:
        holds = bool(np.array_equal(z_zero, f_zero))
    else:
        holds = int(z_zero.sum()) == int(f_zero.sum())
    return RequirementCheck(rtype, holds, None if holds else v.copy())


def sample_domain_points(F: NonlinearMap, samples: int, seed: int) -> np.ndarray:
    """Deterministic points of F's domain for sampled requirement checks.

    Includes the zero vector and points with planted zero entries; for
    quantizers the scale is tied to the step so sub-step magnitudes occur.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    rng = seeded_rng(seed)
    pts = np.empty((samples, F.dim))
    for i in range(samples):
        if i == 0:
            pts[i] = 0.0
            continue
        if F.kind == "sine":
            bound = np.pi * (1.0 - 1e-9)
            z = rng.uniform(-bound, bound, size=F.dim)
        elif F.kind in ("quantize_afz", "quantize_floor"):
            z = rng.standard_normal(F.dim) * F.step
        else:
            z = rng.standard_normal(F.dim)
        if i % 3 == 1:
            z[rng.random(F.dim) < 0.5] = 0.0
        pts[i] = z
    return pts


def check_requirement_sampled(F: NonlinearMap, rtype: int, samples: int, seed: int) -> RequirementCheck:
    """Evaluate a requirement at sampled domain points; the first failing
    point becomes the witness."""
    for z in sample_domain_points(F, samples, seed):
        res = check_requirement(F, rtype, z)
        if not res.holds:
            return res
    return RequirementCheck(rtype, True, None)
