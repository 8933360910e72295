"""Free supertensor words, twisted symmetric-group actions, and normal forms.

A supervector space (V0|V1) has even generators (free-commuting in the
supersymmetric quotient, anticommuting in the superexterior one) and odd
generators (the other way around).  The two quotients are realised by
explicit normal-form maps whose correctness is *tested* against invariance
under the twisted actions, never assumed.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .scalars import (
    EVEN,
    ODD,
    IndexSet,
    MultiDegree,
    Parity,
    format_scalar,
    iter_multidegrees,
    parse_scalar,
    relative_signature,
    signature,
)


@dataclass(frozen=True)
class SuperSpace:
    even_dim: int
    odd_dim: int
    even_names: tuple = ()
    odd_names: tuple = ()

    def __post_init__(self):
        if self.even_dim < 0 or self.odd_dim < 0:
            raise ValueError("dimensions must be non-negative")
        if not self.even_names:
            object.__setattr__(self, "even_names",
                               tuple("v%d" % i for i in range(1, self.even_dim + 1)))
        if not self.odd_names:
            object.__setattr__(self, "odd_names",
                               tuple("s%d" % i for i in range(1, self.odd_dim + 1)))
        if len(self.even_names) != self.even_dim or len(self.odd_names) != self.odd_dim:
            raise ValueError("name count does not match dimensions")


class TensorWord:
    """coeff * (g_1 ⊗ ... ⊗ g_k), each factor a (parity, index) generator."""

    __slots__ = ("space", "factors", "coeff")

    def __init__(self, space, factors, coeff=1):
        self.space = space
        facs = []
        for p, i in factors:
            p = Parity(p)
            dim = space.odd_dim if p else space.even_dim
            if not 1 <= i <= dim:
                raise ValueError("generator %d out of range for %s block" % (i, p.to_json()))
            facs.append((p, i))
        self.factors = tuple(facs)
        self.coeff = Fraction(coeff)

    @property
    def rank(self):
        return len(self.factors)

    @property
    def parity(self):
        return Parity.of(sum(1 for p, _ in self.factors if p))

    def odd_positions(self):
        return [pos for pos, (p, _) in enumerate(self.factors, start=1) if p]

    def __eq__(self, other):
        if not isinstance(other, TensorWord):
            return NotImplemented
        return (self.space == other.space and self.factors == other.factors
                and self.coeff == other.coeff)

    __hash__ = None

    def __repr__(self):
        if not self.factors:
            return "%s*1" % format_scalar(self.coeff)
        names = []
        for p, i in self.factors:
            names.append(self.space.odd_names[i - 1] if p else self.space.even_names[i - 1])
        return "%s*%s" % (format_scalar(self.coeff), "⊗".join(names))


def odd_signature(sigma, word):
    """sgn⁻σ(word): relative signature of σ with respect to the odd positions."""
    if len(sigma) != word.rank:
        raise ValueError("permutation degree %d != word rank %d" % (len(sigma), word.rank))
    return relative_signature(sigma, word.odd_positions())


def _reposition(sigma, word):
    # place factor i at slot sigma(i)
    out = [None] * word.rank
    for i, f in enumerate(word.factors, start=1):
        out[sigma(i) - 1] = f
    return tuple(out)


def act_sym(sigma, word):
    s = odd_signature(sigma, word)
    return TensorWord(word.space, _reposition(sigma, word), s * word.coeff)


def act_alt(sigma, word):
    s = odd_signature(sigma, word) * signature(sigma)
    return TensorWord(word.space, _reposition(sigma, word), s * word.coeff)


def _block_indices(word):
    evens = [i for p, i in word.factors if not p]
    odds = [i for p, i in word.factors if p]
    return evens, odds


def _inversions(seq):
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return inv


def normalize_supersym(word):
    """Class of the word in Sym(V0|V1) ≅ Sym V0 ⊗ Λ V1.

    Evens sort freely, odds sort with the inversion sign, a repeated odd
    generator kills the word.  Even-odd crossings carry no sign (the
    symmetric twisted action is sign-free there)."""
    evens, odds = _block_indices(word)
    elem = SuperSymElem.zero(word.space)
    if len(set(odds)) != len(odds):
        return elem
    sign = -1 if _inversions(odds) % 2 else 1
    deg = [0] * word.space.even_dim
    for i in evens:
        deg[i - 1] += 1
    key = (MultiDegree(deg), IndexSet(sorted(odds)))
    return SuperSymElem(word.space, {key: sign * word.coeff})


def normalize_superext(word):
    """Class of the word in Λ(V0|V1) ≅ Λ V0 ⊗ Sym V1.

    Evens anticommute (repeated even kills the word), odds commute, and each
    odd-before-even crossing contributes −1: that is what makes the
    alternating twisted action descend to the quotient."""
    evens, odds = _block_indices(word)
    elem = SuperExtElem.zero(word.space)
    if len(set(evens)) != len(evens):
        return elem
    crossings = 0
    seen_odd = 0
    for p, _ in word.factors:
        if p:
            seen_odd += 1
        else:
            crossings += seen_odd
    sign = -1 if (_inversions(evens) + crossings) % 2 else 1
    deg = [0] * word.space.odd_dim
    for i in odds:
        deg[i - 1] += 1
    key = (IndexSet(sorted(evens)), MultiDegree(deg))
    return SuperExtElem(word.space, {key: sign * word.coeff})


def _merge_sign(a, b):
    i, j = 0, 0
    inv = 0
    out = []
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None, 0
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            inv += len(a) - i
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), (-1 if inv % 2 else 1)


def _add_term(terms, key, c):
    acc = terms.get(key, 0) + c
    if acc:
        terms[key] = acc
    elif key in terms:
        del terms[key]


class _GradedElem:
    """Shared plumbing for the two normal-form algebras."""

    __slots__ = ("space", "terms")

    def __init__(self, space, terms=None):
        self.space = space
        clean = {}
        for (a, b), v in (terms or {}).items():
            v = Fraction(v)
            if v:
                clean[(a, b)] = clean.get((a, b), 0) + v
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def zero(cls, space):
        return cls(space, {})

    @classmethod
    def unit(cls, space, coeff=1):
        return cls(space, {cls._unit_key(space): Fraction(coeff)})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, type(self)):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    __hash__ = None

    def __add__(self, other):
        if type(other) is not type(self) or other.space != self.space:
            raise ValueError("mismatched operands")
        terms = dict(self.terms)
        for k, v in other.terms.items():
            _add_term(terms, k, v)
        return type(self)(self.space, terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        return type(self)(self.space, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)


class SuperSymElem(_GradedElem):
    """Element of Sym(V0|V1): keys are (MultiDegree on evens, IndexSet on odds)."""

    @staticmethod
    def _unit_key(space):
        return (MultiDegree((0,) * space.even_dim), IndexSet(()))

    def mul(self, other):
        # supercommutative product: Sym factors add, Λ factors merge with sign
        terms = {}
        for (d1, k1), v1 in self.terms.items():
            for (d2, k2), v2 in other.terms.items():
                merged, s = _merge_sign(k1, k2)
                if merged is None:
                    continue
                key = (MultiDegree(tuple(a + b for a, b in zip(d1, d2))), IndexSet(merged))
                _add_term(terms, key, s * v1 * v2)
        return SuperSymElem(self.space, terms)

    def __mul__(self, other):
        if isinstance(other, SuperSymElem):
            return self.mul(other)
        return self.scale(other)

    def term_parity(self, key):
        return Parity.of(len(key[1]))

    def to_json(self):
        items = sorted(self.terms.items(),
                       key=lambda kv: (sum(kv[0][0]) + len(kv[0][1]), kv[0]))
        out = []
        for (d, k), v in items:
            even = [i + 1 for i, e in enumerate(d) for _ in range(e)]
            out.append({"coeff": format_scalar(v), "even": even, "odd": list(k)})
        return out

    @classmethod
    def from_json(cls, space, data):
        if not isinstance(data, list):
            raise ValueError("expected a list of monomials")
        terms = {}
        for i, item in enumerate(data):
            if not isinstance(item, dict) or not {"coeff", "even", "odd"} <= set(item):
                raise ValueError("monomial %d must have coeff/even/odd" % i)
            deg = [0] * space.even_dim
            for g in item["even"]:
                if not 1 <= g <= space.even_dim:
                    raise ValueError("even index %r out of range in monomial %d" % (g, i))
                deg[g - 1] += 1
            key = (MultiDegree(deg), IndexSet(item["odd"]))
            _add_term(terms, key, parse_scalar(item["coeff"]))
        return cls(space, terms)


class SuperExtElem(_GradedElem):
    """Element of Λ(V0|V1): keys are (IndexSet on evens, MultiDegree on odds).

    The parity of a monomial is the parity of its Λ factor."""

    @staticmethod
    def _unit_key(space):
        return (IndexSet(()), MultiDegree((0,) * space.odd_dim))

    def wedge(self, other):
        # sign from the Λ factors only; Sym factors multiply freely
        terms = {}
        for (k1, d1), v1 in self.terms.items():
            for (k2, d2), v2 in other.terms.items():
                merged, s = _merge_sign(k1, k2)
                if merged is None:
                    continue
                key = (IndexSet(merged), MultiDegree(tuple(a + b for a, b in zip(d1, d2))))
                _add_term(terms, key, s * v1 * v2)
        return SuperExtElem(self.space, terms)

    def __mul__(self, other):
        if isinstance(other, SuperExtElem):
            return self.wedge(other)
        return self.scale(other)

    def term_parity(self, key):
        return Parity.of(len(key[0]))

    def parity_part(self, parity):
        p = int(parity) % 2
        return SuperExtElem(self.space,
                            {k: v for k, v in self.terms.items() if len(k[0]) % 2 == p})

    def insert(self, parity, coeffs):
        """Interior product by a homogeneous vector: even vectors contract the
        Λ factor (alternating signs), odd vectors differentiate the Sym factor."""
        parity = Parity(parity)
        want = self.space.even_dim if parity == EVEN else self.space.odd_dim
        if len(coeffs) != want:
            raise ValueError("vector needs %d coefficients" % want)
        coeffs = [Fraction(c) for c in coeffs]
        terms = {}
        for (k, d), v in self.terms.items():
            if parity == EVEN:
                sign = 1
                for t in range(len(k)):
                    c = coeffs[k[t] - 1]
                    if c:
                        _add_term(terms, (IndexSet(k[:t] + k[t + 1:]), d), sign * c * v)
                    sign = -sign
            else:
                for j in range(len(d)):
                    if d[j] and coeffs[j]:
                        nd = list(d)
                        nd[j] -= 1
                        _add_term(terms, (k, MultiDegree(nd)), d[j] * coeffs[j] * v)
        return SuperExtElem(self.space, terms)

    def to_json(self):
        items = sorted(self.terms.items(),
                       key=lambda kv: (len(kv[0][0]) + sum(kv[0][1]), kv[0]))
        out = []
        for (k, d), v in items:
            odd = [i + 1 for i, e in enumerate(d) for _ in range(e)]
            out.append({"coeff": format_scalar(v), "even": list(k), "odd": odd})
        return out

    @classmethod
    def from_json(cls, space, data):
        if not isinstance(data, list):
            raise ValueError("expected a list of monomials")
        terms = {}
        for i, item in enumerate(data):
            if not isinstance(item, dict) or not {"coeff", "even", "odd"} <= set(item):
                raise ValueError("monomial %d must have coeff/even/odd" % i)
            deg = [0] * space.odd_dim
            for g in item["odd"]:
                if not 1 <= g <= space.odd_dim:
                    raise ValueError("odd index %r out of range in monomial %d" % (g, i))
                deg[g - 1] += 1
            key = (IndexSet(item["even"]), MultiDegree(deg))
            _add_term(terms, key, parse_scalar(item["coeff"]))
        return cls(space, terms)


def super_wedge(a, b):
    return a.wedge(b)


def super_insert(parity, coeffs, a):
    return a.insert(parity, coeffs)


def supersym_basis(space, k):
    """Normal-form basis keys of Sym^k(V0|V1)."""
    for b in range(min(k, space.odd_dim) + 1):
        a = k - b
        for d in iter_multidegrees(space.even_dim, a):
            for ks in combinations(range(1, space.odd_dim + 1), b):
                yield (d, IndexSet(ks))


def superext_basis(space, k):
    """Normal-form basis keys of Λ^k(V0|V1)."""
    for a in range(min(k, space.even_dim) + 1):
        b = k - a
        for ks in combinations(range(1, space.even_dim + 1), a):
            for d in iter_multidegrees(space.odd_dim, b):
                yield (IndexSet(ks), d)
