"""Measure-preserving actions on finite probability spaces.

Implements the Koopman operator (g . f)(x) = f(g^-1 . x), the L2 inner
product (conjugate-linear in the second slot), and the invariant
projection given by averaging the Koopman translates over the group.
"""

from __future__ import annotations

import math

import numpy as np

from .groups import conjugacy_classes

_WEIGHT_TOL = 1e-12


class SpaceMismatchError(ValueError):
    pass


class ActionValidationError(ValueError):
    pass


class ProbabilitySpace:
    def __init__(self, weights):
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or np.any(w < 0):
            raise ValueError("weights must be a 1-d array of non-negative reals")
        if abs(float(w.sum()) - 1.0) > _WEIGHT_TOL:
            raise ValueError("weights must sum to 1 within %g" % _WEIGHT_TOL)
        self.weights = w
        self.size = len(w)

    @classmethod
    def uniform(cls, n):
        return cls(np.full(n, 1.0 / n))

    def __eq__(self, other):
        return isinstance(other, ProbabilitySpace) and np.array_equal(self.weights, other.weights)


class Observable:
    """A complex-valued function on a finite probability space."""

    def __init__(self, space, values):
        v = np.asarray(values, dtype=np.complex128)
        if v.shape != (space.size,):
            raise SpaceMismatchError("observable has %d values for a space of size %d"
                                     % (v.size, space.size))
        self.space = space
        self.values = v

    @property
    def norm2(self):
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2 * self.space.weights)))

    @property
    def norm_inf(self):
        return float(np.max(np.abs(self.values))) if self.space.size else 0.0

    def __mul__(self, other):
        if isinstance(other, Observable):
            if other.space is not self.space and other.space != self.space:
                raise SpaceMismatchError("pointwise product across different spaces")
            return Observable(self.space, self.values * other.values)
        return Observable(self.space, self.values * other)

    __rmul__ = __mul__

    def __sub__(self, other):
        return Observable(self.space, self.values - other.values)

    def __add__(self, other):
        return Observable(self.space, self.values + other.values)


def inner(space, f1, f2):
    """<f1, f2> = sum_x f1(x) conj(f2(x)) nu(x), compensated fixed-order sum."""
    if f1.space.size != space.size or f2.space.size != space.size:
        raise SpaceMismatchError("inner product across mismatched spaces")
    t = f1.values * np.conj(f2.values) * space.weights
    return complex(math.fsum(t.real), math.fsum(t.imag))


KINDS = ("left", "right", "conjugation", "custom")


class ActionTable:
    """An action of a group on a finite probability space.

    Built-in kinds act on X = G: left g.x = gx, right g.x = x g^-1,
    conjugation g.x = g x g^-1.  Custom actions supply an explicit
    (|G|, |X|) table of act(g, x) and are validated at build time.
    """

    def __init__(self, group, space, kind, rows=None, validate=True):
        if kind not in KINDS:
            raise ValueError("unknown action kind %r" % kind)
        self.group = group
        self.space = space
        self.kind = kind
        self._rows = None
        self._inv_rows = None
        self._orbit_of = None
        if kind == "custom":
            rows = np.asarray(rows)
            if rows.shape != (group.order, space.size):
                raise ActionValidationError("rows must have shape (|G|, |X|)")
            self._rows = rows.astype(np.int64)
            if validate:
                self._validate_custom()

    def _validate_custom(self):
        G, rows = self.group, self._rows
        xs = np.arange(self.space.size)
        if not np.array_equal(rows[G.identity], xs):
            raise ActionValidationError("identity does not act trivially")
        for g in range(G.order):
            if np.bincount(rows[g], minlength=self.space.size).max() != 1:
                raise ActionValidationError("element %d does not act bijectively" % g)
            if np.max(np.abs(self.space.weights[rows[g]] - self.space.weights)) > _WEIGHT_TOL:
                raise ActionValidationError("element %d does not preserve the measure" % g)
        rng = np.random.default_rng(0)
        m = min(G.order * G.order, 10_000)
        gs = rng.integers(0, G.order, m)
        hs = rng.integers(0, G.order, m)
        pts = rng.integers(0, self.space.size, m)
        lhs = rows[G.mul_pairs(gs, hs), pts]
        rhs = rows[gs, rows[hs, pts]]
        if np.any(lhs != rhs):
            raise ActionValidationError("action is not associative with the group law")

    def act_row(self, g):
        """x -> g . x over all points of X."""
        if self._rows is not None:
            return self._rows[g]
        G = self.group
        xs = np.arange(G.order, dtype=np.int64)
        if self.kind == "left":
            return G.mul_vec(g, xs)
        if self.kind == "right":
            return G.vec_mul(xs, int(G.inv[g]))
        return G.vec_mul(G.mul_vec(g, xs), int(G.inv[g]))

    def act(self, g, x):
        return int(self.act_row(g)[x])

    def inv_rows_matrix(self):
        """Matrix M with M[g, x] = g^-1 . x, cached; drives exact g-averages."""
        if self._inv_rows is None:
            G = self.group
            M = np.empty((G.order, self.space.size), dtype=np.int32)
            for g in range(G.order):
                M[g] = self.act_row(int(G.inv[g]))
            self._inv_rows = M
        return self._inv_rows

    def orbit_of(self):
        """Orbit index per point of X (orbits of the full group action)."""
        if self._orbit_of is not None:
            return self._orbit_of
        n_x = self.space.size
        if self.kind in ("left", "right"):
            out = np.zeros(n_x, dtype=np.int64)
        elif self.kind == "conjugation":
            out = conjugacy_classes(self.group).class_of.copy()
        else:
            out = np.full(n_x, -1, dtype=np.int64)
            next_id = 0
            for seed in range(n_x):
                if out[seed] >= 0:
                    continue
                members = np.unique(self._rows[:, seed])
                out[members] = next_id
                next_id += 1
        self._orbit_of = out
        return out


def build_action(G, kind):
    """The left/right translation or conjugation action of G on itself."""
    if kind not in ("left", "right", "conjugation"):
        raise ValueError("built-in kinds are left, right, conjugation")
    return ActionTable(G, ProbabilitySpace.uniform(G.order), kind)


def cached_action(G, kind):
    """Per-group memo of the built-in actions (shares the row matrices)."""
    cache = getattr(G, "_action_cache", None)
    if cache is None:
        cache = G._action_cache = {}
    if kind not in cache:
        cache[kind] = build_action(G, kind)
    return cache[kind]


def trivial_action(G, space=None):
    space = space if space is not None else ProbabilitySpace.uniform(G.order)
    rows = np.tile(np.arange(space.size), (G.order, 1))
    return ActionTable(G, space, "custom", rows=rows, validate=False)


def koopman_apply(a, g, f):
    """(g . f)(x) = f(g^-1 . x); unitary on L2(X, nu)."""
    if f.space.size != a.space.size:
        raise SpaceMismatchError("observable not on the action's space")
    return Observable(f.space, f.values[a.act_row(int(a.group.inv[g]))])


def invariant_projection(a, f):
    """Group average of the Koopman translates (mean ergodic theorem).

    (1/|G|) sum_g f(g^-1 . x) collapses, exactly, to the unweighted mean
    of f over the orbit of x: every orbit point is hit |G|/|orbit| times.
    """
    if f.space.size != a.space.size:
        raise SpaceMismatchError("observable not on the action's space")
    orbit_of = a.orbit_of()
    n_orbits = int(orbit_of.max()) + 1
    sums = np.zeros(n_orbits, dtype=np.complex128)
    np.add.at(sums, orbit_of, f.values)
    counts = np.bincount(orbit_of, minlength=n_orbits)
    return Observable(f.space, (sums / counts)[orbit_of])


def random_observable(space, seed, norm_mode="linf_unit"):
    """Seed-deterministic random observable; values uniform on the unit disc."""
    if norm_mode not in ("linf_unit", "l2_unit"):
        raise ValueError("norm_mode must be linf_unit or l2_unit")
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0.0, 1.0, space.size))
    theta = rng.uniform(0.0, 2.0 * np.pi, space.size)
    values = r * np.exp(1j * theta)
    f = Observable(space, values)
    if norm_mode == "l2_unit":
        nrm = f.norm2
        if nrm > 0:
            f = Observable(space, values / nrm)
    return f
