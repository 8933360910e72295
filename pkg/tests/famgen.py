"""Builders for commuting odd families with a known straightening: conjugate
the pure insertion family by a unipotent generator substitution, so the
result commutes by construction and its constant part is the chosen matrix."""

from fractions import Fraction

from superalg.exterior import ExtElem
from superalg.scalars import IndexSet, inversion_sign
from superalg.straighten import CompElem, OddFamily, Straightening


def apply_subst(g, x):
    out = ExtElem.zero(g.space)
    for key, c in x.terms.items():
        out = out + g.apply_to_monomial(key).scale(c)
    return out


def subst_inverse_image(g, nu):
    # unipotent fixpoint iteration: x <- ds_nu - (G - id)(x)
    target = ExtElem.generator(g.space, nu)
    x = target
    for _ in range(g.dim_s // 2 + 1):
        x = target - (apply_subst(g, x) - x)
    assert apply_subst(g, x) == target
    return x


def conjugated_family(f_mat, g):
    """The family v ↦ G ∘ (f(v) ⌟) ∘ G⁻¹ as generator-image data."""
    q = g.dim_s
    n = len(f_mat[0]) if f_mat else 0
    ginv = [subst_inverse_image(g, nu) for nu in range(1, q + 1)]
    comps = []
    for i in range(n):
        fcol = [f_mat[mu][i] for mu in range(q)]
        terms = {}
        for nu in range(1, q + 1):
            img = apply_subst(g, ginv[nu - 1].insert(fcol))
            for key, c in img.terms.items():
                terms[(key, nu)] = c
        comps.append(CompElem(q, terms))
    return OddFamily(n, q, comps)


def relabel_family(fam, perm):
    """Conjugate by the algebra automorphism ds_k ↦ ds_perm(k)."""
    comps = []
    for comp in fam.comps:
        terms = {}
        for (key, s), c in comp.terms.items():
            seq = [perm[k - 1] for k in key]
            key2 = (IndexSet(sorted(seq)), perm[s - 1])
            terms[key2] = terms.get(key2, 0) + inversion_sign(seq) * c
        comps.append(CompElem(fam.dim_s, terms))
    return OddFamily(fam.dim_v, fam.dim_s, comps)


def pull_back_straightening(g, perm):
    """R⁻¹ ∘ G ∘ R for the relabeling R: ds_k ↦ ds_perm(k)."""
    q = g.dim_s
    inv = [0] * q
    for k in range(1, q + 1):
        inv[perm[k - 1] - 1] = k
    images = []
    for nu in range(1, q + 1):
        src = g.images[perm[nu - 1] - 1]
        out = ExtElem.zero(g.space)
        for key, c in src.terms.items():
            seq = [inv[k - 1] for k in key]
            out = out + ExtElem.monomial(g.space, sorted(seq), inversion_sign(seq) * c)
        images.append(out)
    return Straightening(q, images)
