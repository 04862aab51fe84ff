"""Finite groups as dense index structures with normalized counting measure.

Elements are indices 0..n-1.  Small groups carry a full multiplication
table; large groups (matrix / permutation families) multiply through their
canonical forms with vectorized numpy kernels and a memoized inverse table.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

MAX_ORDER = 2_000_000
DENSE_LIMIT = 4096

_INDEX_DTYPE = np.int64


class GroupConstructionError(ValueError):
    """Unsupported family, bad parameter, or order above the cap."""


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _lookup(sorted_codes, queries):
    """Map canonical-form codes to element indices (codes must all be present)."""
    return np.searchsorted(sorted_codes, queries)


# ---------------------------------------------------------------------------
# backends


class _Backend:
    """Multiplication kernel on element indices.

    Subclasses set ``n`` and ``identity`` and implement the vectorized maps.
    """

    n = 0
    identity = 0

    def mul_vec(self, i, js):
        """i * js, elementwise over the array js."""
        raise NotImplementedError

    def vec_mul(self, is_, j):
        """is_ * j, elementwise over the array is_."""
        raise NotImplementedError

    def mul_pairs(self, is_, js):
        """is_ * js elementwise (equal-length arrays)."""
        raise NotImplementedError

    def inv_all(self):
        raise NotImplementedError

    def generators(self):
        raise NotImplementedError

    def label(self, i):
        raise NotImplementedError


class _Cyclic(_Backend):
    def __init__(self, n):
        self.n = n
        self.identity = 0

    def mul_vec(self, i, js):
        return (i + np.asarray(js, dtype=_INDEX_DTYPE)) % self.n

    def vec_mul(self, is_, j):
        return (np.asarray(is_, dtype=_INDEX_DTYPE) + j) % self.n

    def mul_pairs(self, is_, js):
        return (np.asarray(is_, dtype=_INDEX_DTYPE) + np.asarray(js)) % self.n

    def inv_all(self):
        return (-np.arange(self.n, dtype=_INDEX_DTYPE)) % self.n

    def generators(self):
        return [1] if self.n > 1 else []

    def label(self, i):
        return str(i)


class _Dihedral(_Backend):
    """Order 2n; index a*n + k encodes s^a r^k with r s = s r^-1."""

    def __init__(self, n):
        self.rot = n
        self.n = 2 * n
        self.identity = 0

    def _split(self, idx):
        idx = np.asarray(idx, dtype=_INDEX_DTYPE)
        return idx // self.rot, idx % self.rot

    def _join(self, a, k):
        return a * self.rot + k

    def mul_pairs(self, is_, js):
        a, k = self._split(is_)
        b, m = self._split(js)
        sign = 1 - 2 * b
        return self._join((a + b) % 2, (m + k * sign) % self.rot)

    def mul_vec(self, i, js):
        return self.mul_pairs(np.full(np.shape(js), i, dtype=_INDEX_DTYPE), js)

    def vec_mul(self, is_, j):
        return self.mul_pairs(is_, np.full(np.shape(is_), j, dtype=_INDEX_DTYPE))

    def inv_all(self):
        idx = np.arange(self.n, dtype=_INDEX_DTYPE)
        a, k = self._split(idx)
        # (s^a r^k)^-1 = r^-k for a=0, itself for a=1
        return self._join(a, np.where(a == 0, (-k) % self.rot, k))

    def generators(self):
        gens = []
        if self.rot > 1:
            gens.append(1)
        gens.append(self.rot)  # s
        return gens

    def label(self, i):
        a, k = int(i) // self.rot, int(i) % self.rot
        return ("s" if a else "") + "r%d" % k


class _Perm(_Backend):
    """Symmetric group on deg points, elements in lexicographic one-line order."""

    def __init__(self, deg):
        self.deg = deg
        self.perms = np.array(
            list(itertools.permutations(range(deg))), dtype=_INDEX_DTYPE
        )
        self.n = len(self.perms)
        self.codes = self._code(self.perms)
        # itertools emits lexicographic order, which the base-deg code preserves
        assert np.all(np.diff(self.codes) > 0)
        self.identity = int(_lookup(self.codes, self._code(np.arange(deg)[None, :]))[0])

    def _code(self, perms):
        code = np.zeros(perms.shape[0], dtype=_INDEX_DTYPE)
        for col in range(self.deg):
            code = code * self.deg + perms[:, col]
        return code

    def _index_of(self, perms):
        return _lookup(self.codes, self._code(perms))

    def mul_vec(self, i, js):
        # (p_i o p_j)(x) = p_i[p_j[x]]
        return self._index_of(self.perms[i][self.perms[np.asarray(js)]])

    def vec_mul(self, is_, j):
        return self._index_of(self.perms[np.asarray(is_)][:, self.perms[j]])

    def mul_pairs(self, is_, js):
        pi = self.perms[np.asarray(is_)]
        pj = self.perms[np.asarray(js)]
        return self._index_of(np.take_along_axis(pi, pj, axis=1))

    def inv_all(self):
        return self._index_of(np.argsort(self.perms, axis=1))

    def generators(self):
        if self.deg < 2:
            return []
        swap = np.arange(self.deg)
        swap[0], swap[1] = 1, 0
        cyc = np.roll(np.arange(self.deg), -1)
        gens = {int(self._index_of(swap[None, :])[0]), int(self._index_of(cyc[None, :])[0])}
        return sorted(gens)

    def label(self, i):
        return "".join(str(v + 1) for v in self.perms[i])


class _Mat2(_Backend):
    """SL(2,p), or PSL(2,p) as +/- orbits labeled by the lex-smaller matrix."""

    def __init__(self, p, projective):
        self.p = p
        self.projective = projective
        inv_t = np.array([0] + [pow(a, p - 2, p) for a in range(1, p)], dtype=_INDEX_DTYPE)
        ar = np.arange(p, dtype=_INDEX_DTYPE)
        # a != 0: d determined by det = 1
        a, b, c = (x.ravel() for x in np.meshgrid(ar[1:], ar, ar, indexing="ij"))
        d = (1 + b * c) % p * inv_t[a] % p
        # a == 0: bc = -1, d free
        b0, d0 = (x.ravel() for x in np.meshgrid(ar[1:], ar, indexing="ij"))
        a0 = np.zeros_like(b0)
        c0 = (-inv_t[b0]) % p
        mats = np.stack(
            [np.concatenate([a, a0]), np.concatenate([b, b0]),
             np.concatenate([c, c0]), np.concatenate([d, d0])], axis=1
        )
        codes = self._flat_code(mats)
        if projective:
            keep = codes < self._flat_code((p - mats) % p)
            mats, codes = mats[keep], codes[keep]
        order = np.argsort(codes)
        self.mats = mats[order]
        self.codes = codes[order]
        self.n = len(self.mats)
        # dense code -> index map: one gather instead of a binary search
        self._dense_lookup = None
        if p ** 4 <= 20_000_000:
            lut = np.full(p ** 4, -1, dtype=np.int32)
            lut[self.codes] = np.arange(self.n, dtype=np.int32)
            if projective:
                lut[self._flat_code((p - self.mats) % p)] = np.arange(self.n, dtype=np.int32)
            self._dense_lookup = lut
        self.identity = int(self._index_of(np.array([[1, 0, 0, 1]], dtype=_INDEX_DTYPE))[0])

    def _flat_code(self, mats):
        p = self.p
        return ((mats[..., 0] * p + mats[..., 1]) * p + mats[..., 2]) * p + mats[..., 3]

    def _index_of(self, mats):
        codes = self._flat_code(mats)
        if self._dense_lookup is not None:
            return self._dense_lookup[codes].astype(_INDEX_DTYPE)
        if self.projective:
            codes = np.minimum(codes, self._flat_code((self.p - mats) % self.p))
        return _lookup(self.codes, codes)

    def _mat_mul(self, A, B):
        p = self.p
        a = (A[..., 0] * B[..., 0] + A[..., 1] * B[..., 2]) % p
        b = (A[..., 0] * B[..., 1] + A[..., 1] * B[..., 3]) % p
        c = (A[..., 2] * B[..., 0] + A[..., 3] * B[..., 2]) % p
        d = (A[..., 2] * B[..., 1] + A[..., 3] * B[..., 3]) % p
        return np.stack([a, b, c, d], axis=-1)

    def mul_vec(self, i, js):
        return self._index_of(self._mat_mul(self.mats[i], self.mats[np.asarray(js)]))

    def vec_mul(self, is_, j):
        return self._index_of(self._mat_mul(self.mats[np.asarray(is_)], self.mats[j]))

    def mul_pairs(self, is_, js):
        return self._index_of(self._mat_mul(self.mats[np.asarray(is_)], self.mats[np.asarray(js)]))

    def inv_all(self):
        m = self.mats
        invm = np.stack([m[:, 3], (-m[:, 1]) % self.p, (-m[:, 2]) % self.p, m[:, 0]], axis=1)
        return self._index_of(invm)

    def generators(self):
        gens = self._index_of(np.array([[1, 1, 0, 1], [1, 0, 1, 1]], dtype=_INDEX_DTYPE))
        return sorted(set(int(g) for g in gens))

    def label(self, i):
        a, b, c, d = (int(v) for v in self.mats[i])
        body = "[[%d,%d],[%d,%d]]" % (a, b, c, d)
        return ("±" + body) if self.projective else body


class _Product(_Backend):
    def __init__(self, A, B):
        self.A, self.B = A, B
        self.n = A.n * B.n
        self.identity = A.identity * B.n + B.identity

    def _split(self, idx):
        idx = np.asarray(idx, dtype=_INDEX_DTYPE)
        return idx // self.B.n, idx % self.B.n

    def mul_pairs(self, is_, js):
        ia, ib = self._split(is_)
        ja, jb = self._split(js)
        return self.A.mul_pairs(ia, ja) * self.B.n + self.B.mul_pairs(ib, jb)

    def mul_vec(self, i, js):
        ia, ib = i // self.B.n, i % self.B.n
        ja, jb = self._split(js)
        return self.A.mul_vec(ia, ja) * self.B.n + self.B.mul_vec(ib, jb)

    def vec_mul(self, is_, j):
        ja, jb = j // self.B.n, j % self.B.n
        ia, ib = self._split(is_)
        return self.A.vec_mul(ia, ja) * self.B.n + self.B.vec_mul(ib, jb)

    def inv_all(self):
        return (self.A.inv_all()[:, None] * self.B.n + self.B.inv_all()[None, :]).ravel()

    def generators(self):
        gens = [g * self.B.n + self.B.identity for g in self.A.generators()]
        gens += [self.A.identity * self.B.n + g for g in self.B.generators()]
        return gens

    def label(self, i):
        return "(%s,%s)" % (self.A.label(i // self.B.n), self.B.label(i % self.B.n))


class _Explicit(_Backend):
    """Backend over a raw multiplication table; used for injected-fault tests."""

    def __init__(self, table):
        self.table = np.asarray(table, dtype=_INDEX_DTYPE)
        self.n = len(self.table)
        self.identity = self._find_identity()

    def _find_identity(self):
        idx = np.arange(self.n)
        for e in range(self.n):
            if np.array_equal(self.table[e], idx) and np.array_equal(self.table[:, e], idx):
                return e
        return 0

    def mul_vec(self, i, js):
        return self.table[i, np.asarray(js)]

    def vec_mul(self, is_, j):
        return self.table[np.asarray(is_), j]

    def mul_pairs(self, is_, js):
        return self.table[np.asarray(is_), np.asarray(js)]

    def inv_all(self):
        inv = np.full(self.n, -1, dtype=_INDEX_DTYPE)
        rows, cols = np.nonzero(self.table == self.identity)
        inv[rows] = cols
        return inv

    def generators(self):
        return list(range(self.n))

    def label(self, i):
        return str(i)


# ---------------------------------------------------------------------------
# group table


class GroupTable:
    """A finite group with uniform probability weight 1/|G| per element."""

    def __init__(self, backend, desc):
        if backend.n > MAX_ORDER:
            raise GroupConstructionError(
                "order %d of %r exceeds cap %d" % (backend.n, desc, MAX_ORDER)
            )
        self.backend = backend
        self.desc = desc
        self.order = backend.n
        self.identity = backend.identity
        self.inv = backend.inv_all()
        self.table = None
        if self.order <= DENSE_LIMIT:
            xs = np.arange(self.order, dtype=_INDEX_DTYPE)
            self.table = np.empty((self.order, self.order), dtype=np.int32)
            for g in range(self.order):
                self.table[g] = backend.mul_vec(g, xs)
        # downstream caches (conjugacy data, degrees) live on the instance
        self._conjugacy = None
        self._degrees = None

    @classmethod
    def from_table(cls, table, desc="explicit"):
        """Wrap a raw table without validation (see verify_group_axioms)."""
        return cls(_Explicit(table), desc)

    def __repr__(self):
        return "GroupTable(%s, order=%d)" % (self.desc, self.order)

    def mul(self, i, j):
        if self.table is not None:
            return int(self.table[i, j])
        return int(self.backend.mul_vec(i, np.array([j]))[0])

    def mul_vec(self, i, js):
        if self.table is not None:
            return self.table[i, np.asarray(js)]
        return self.backend.mul_vec(i, js)

    def vec_mul(self, is_, j):
        if self.table is not None:
            return self.table[np.asarray(is_), j]
        return self.backend.vec_mul(is_, j)

    def mul_pairs(self, is_, js):
        if self.table is not None:
            return self.table[np.asarray(is_), np.asarray(js)]
        return self.backend.mul_pairs(is_, js)

    def conj_row(self, g):
        """x -> g x g^-1 for all x."""
        xs = np.arange(self.order, dtype=_INDEX_DTYPE)
        return self.vec_mul(self.mul_vec(g, xs), int(self.inv[g]))

    def generators(self):
        return self.backend.generators()

    def label(self, i):
        return self.backend.label(i)

    @property
    def labels(self):
        return [self.backend.label(i) for i in range(self.order)]

    def element_order(self, i):
        k, x = 1, int(i)
        while x != self.identity:
            x = self.mul(x, i)
            k += 1
        return k


# ---------------------------------------------------------------------------
# descriptor grammar: cyclic:<n>, dihedral:<n>, symmetric:<n>, sl2:<p>,
# psl2:<p>, product:<desc>,<desc>

_ATOM_RE = re.compile(r"^(cyclic|dihedral|symmetric|sl2|psl2):(\d+)")


def _parse(s):
    if s.startswith("product:"):
        left, rest = _parse(s[len("product:"):])
        if not rest.startswith(","):
            raise GroupConstructionError("product descriptor needs two comma-separated parts")
        right, rest = _parse(rest[1:])
        return ("product", left, right), rest
    m = _ATOM_RE.match(s)
    if not m:
        raise GroupConstructionError("cannot parse descriptor %r" % s)
    return (m.group(1), int(m.group(2))), s[m.end():]


def parse_descriptor(desc):
    tree, rest = _parse(desc)
    if rest:
        raise GroupConstructionError("trailing junk %r in descriptor %r" % (rest, desc))
    return tree


def _canonical(tree):
    if tree[0] == "product":
        return "product:%s,%s" % (_canonical(tree[1]), _canonical(tree[2]))
    return "%s:%d" % tree


def _build_backend(tree):
    kind = tree[0]
    if kind == "product":
        return _Product(_build_backend(tree[1]), _build_backend(tree[2]))
    n = tree[1]
    if kind == "cyclic":
        if n < 1:
            raise GroupConstructionError("cyclic order must be >= 1")
        return _Cyclic(n)
    if kind == "dihedral":
        if n < 1:
            raise GroupConstructionError("dihedral parameter must be >= 1")
        return _Dihedral(n)
    if kind == "symmetric":
        if not 1 <= n <= 8:
            raise GroupConstructionError("symmetric degree must be in 1..8")
        return _Perm(n)
    if kind in ("sl2", "psl2"):
        if n == 2 or not _is_prime(n) or n > 101:
            raise GroupConstructionError("%s parameter must be an odd prime <= 101" % kind)
        return _Mat2(n, projective=(kind == "psl2"))
    raise GroupConstructionError("unsupported family %r" % kind)


def build_group(desc):
    """Construct a group from a family descriptor string (or parsed tree)."""
    tree = parse_descriptor(desc) if isinstance(desc, str) else desc
    return GroupTable(_build_backend(tree), _canonical(tree))


# ---------------------------------------------------------------------------
# conjugacy classes


@dataclass
class ConjugacyData:
    class_of: np.ndarray        # element index -> class index
    class_sizes: list
    representatives: list       # smallest member of each class

    @property
    def k(self):
        return len(self.class_sizes)


def conjugacy_classes(G):
    """Partition into conjugation orbits, ordered by (size, smallest member)."""
    if G._conjugacy is not None:
        return G._conjugacy
    n = G.order
    class_of = np.full(n, -1, dtype=_INDEX_DTYPE)
    members_per_class = []
    if G.table is not None:
        inv = G.inv
        for seed in range(n):
            if class_of[seed] >= 0:
                continue
            # h * seed * h^-1 over all h in one vectorized pass
            orbit = np.unique(G.mul_pairs(G.table[:, seed], inv))
            class_of[orbit] = len(members_per_class)
            members_per_class.append(orbit)
    else:
        gens = G.generators()
        seen = np.zeros(n, dtype=bool)
        for seed in range(n):
            if seen[seed]:
                continue
            frontier = np.array([seed], dtype=_INDEX_DTYPE)
            seen[seed] = True
            orbit = [frontier]
            while len(frontier):
                new = []
                for g in gens:
                    u = G.vec_mul(G.mul_vec(g, frontier), int(G.inv[g]))
                    fresh = u[~seen[u]]
                    if len(fresh):
                        fresh = np.unique(fresh)
                        seen[fresh] = True
                        new.append(fresh)
                frontier = np.concatenate(new) if new else np.array([], dtype=_INDEX_DTYPE)
                if len(frontier):
                    orbit.append(frontier)
            orbit = np.sort(np.concatenate(orbit))
            class_of[orbit] = len(members_per_class)
            members_per_class.append(orbit)
    order = sorted(range(len(members_per_class)),
                   key=lambda c: (len(members_per_class[c]), int(members_per_class[c][0])))
    remap = np.empty(len(order), dtype=_INDEX_DTYPE)
    for new_idx, old_idx in enumerate(order):
        remap[old_idx] = new_idx
    data = ConjugacyData(
        class_of=remap[class_of],
        class_sizes=[len(members_per_class[c]) for c in order],
        representatives=[int(members_per_class[c][0]) for c in order],
    )
    G._conjugacy = data
    return data


# ---------------------------------------------------------------------------
# axiom verification


@dataclass
class AxiomCheck:
    name: str
    ok: bool
    witness: tuple = None


@dataclass
class AxiomReport:
    checks: list

    @property
    def all_ok(self):
        return all(c.ok for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def verify_group_axioms(G, budget=100_000):
    """Check identity, inverses, associativity, and translation bijectivity.

    Associativity and bijectivity are exhaustive for order <= 512 and
    sampled (>= budget triples) above.  Failures come back as report
    entries with a witness, never as exceptions.
    """
    n = G.order
    xs = np.arange(n, dtype=_INDEX_DTYPE)
    checks = []

    e = G.identity
    left = G.mul_vec(e, xs)
    right = G.vec_mul(xs, e)
    bad = np.nonzero((left != xs) | (right != xs))[0]
    checks.append(AxiomCheck("identity", len(bad) == 0,
                             (int(bad[0]),) if len(bad) else None))

    prod = G.mul_pairs(xs, G.inv)
    bad = np.nonzero(prod != e)[0]
    checks.append(AxiomCheck("inverses", len(bad) == 0,
                             (int(bad[0]),) if len(bad) else None))

    witness = None
    if n <= 512 and G.table is not None:
        T = G.table
        for g in range(n):
            lhs = T[T[g], :]
            rhs = T[g][T]
            if not np.array_equal(lhs, rhs):
                h, k = (int(v) for v in np.argwhere(lhs != rhs)[0])
                witness = (g, h, k)
                break
    else:
        rng = np.random.default_rng(0)
        m = max(budget, 100_000)
        gs, hs, ks = (rng.integers(0, n, m) for _ in range(3))
        lhs = G.mul_pairs(G.mul_pairs(gs, hs), ks)
        rhs = G.mul_pairs(gs, G.mul_pairs(hs, ks))
        bad = np.nonzero(lhs != rhs)[0]
        if len(bad):
            t = int(bad[0])
            witness = (int(gs[t]), int(hs[t]), int(ks[t]))
    checks.append(AxiomCheck("associativity", witness is None, witness))

    witness = None
    sample = range(n) if n <= 512 else np.random.default_rng(1).integers(0, n, 64)
    for g in sample:
        g = int(g)
        row = np.bincount(G.mul_vec(g, xs), minlength=n)
        col = np.bincount(G.vec_mul(xs, g), minlength=n)
        if row.max() != 1 or col.max() != 1:
            witness = (g,)
            break
    checks.append(AxiomCheck("translation_bijectivity", witness is None, witness))

    return AxiomReport(checks)
