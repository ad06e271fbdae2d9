"""Molecular integrals over contracted Cartesian Gaussians.

McMurchie-Davidson scheme: products of Gaussians are expanded in
Hermite Gaussians (coefficients E_t via recursion), one-electron
Coulomb and repulsion integrals then reduce to Hermite Coulomb
integrals R_tuv built from the Boys function.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import hyp1f1

from .basis import BasisFunction


def boys(n: int, x: float) -> float:
    return float(hyp1f1(n + 0.5, n + 1.5, -x)) / (2 * n + 1)


def hermite_coefficients(i: int, j: int, a: float, b: float, ab: float) -> np.ndarray:
    """E_t for t = 0..i+j expanding x^i x'^j exp products in Hermites.

    ``ab`` is the center separation A - B along this axis.
    """
    p = a + b
    q = a * b / p
    table = {}

    def e(idx_i, idx_j, t):
        if t < 0 or t > idx_i + idx_j:
            return 0.0
        if idx_i == idx_j == t == 0:
            return math.exp(-q * ab * ab)
        key = (idx_i, idx_j, t)
        if key in table:
            return table[key]
        if idx_j == 0:  # lower i
            val = (
                e(idx_i - 1, idx_j, t - 1) / (2 * p)
                - q * ab / a * e(idx_i - 1, idx_j, t)
                + (t + 1) * e(idx_i - 1, idx_j, t + 1)
            )
        else:  # lower j
            val = (
                e(idx_i, idx_j - 1, t - 1) / (2 * p)
                + q * ab / b * e(idx_i, idx_j - 1, t)
                + (t + 1) * e(idx_i, idx_j - 1, t + 1)
            )
        table[key] = val
        return val

    return np.array([e(i, j, t) for t in range(i + j + 1)])


def _overlap_1d(i, j, a, b, ab) -> float:
    return hermite_coefficients(i, j, a, b, ab)[0]


def overlap_primitive(a, powers_a, center_a, b, powers_b, center_b) -> float:
    p = a + b
    pref = (math.pi / p) ** 1.5
    value = pref
    for axis in range(3):
        value *= _overlap_1d(
            powers_a[axis], powers_b[axis], a, b, center_a[axis] - center_b[axis]
        )
    return value


def kinetic_primitive(a, powers_a, center_a, b, powers_b, center_b) -> float:
    """-1/2 Laplacian on the second function, via shifted overlaps."""
    p = a + b
    pref = (math.pi / p) ** 1.5
    s = [
        _overlap_1d(powers_a[ax], powers_b[ax], a, b, center_a[ax] - center_b[ax])
        for ax in range(3)
    ]

    def t_1d(ax):
        i, j = powers_a[ax], powers_b[ax]
        ab = center_a[ax] - center_b[ax]
        term = b * (2 * j + 1) * s[ax]
        term -= 2.0 * b * b * _overlap_1d(i, j + 2, a, b, ab)
        if j >= 2:
            term -= 0.5 * j * (j - 1) * _overlap_1d(i, j - 2, a, b, ab)
        return term

    total = (
        t_1d(0) * s[1] * s[2] + s[0] * t_1d(1) * s[2] + s[0] * s[1] * t_1d(2)
    )
    return pref * total


def hermite_coulomb(t, u, v, n, p, pc) -> float:
    """R^n_{tuv}: derivatives of the Boys kernel at separation ``pc``."""
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * float(pc @ pc))
    if t > 0:
        return (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, pc) + pc[
            0
        ] * hermite_coulomb(t - 1, u, v, n + 1, p, pc)
    if u > 0:
        return (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, pc) + pc[
            1
        ] * hermite_coulomb(t, u - 1, v, n + 1, p, pc)
    return (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, pc) + pc[
        2
    ] * hermite_coulomb(t, u, v - 1, n + 1, p, pc)


def nuclear_primitive(a, powers_a, center_a, b, powers_b, center_b, nucleus) -> float:
    p = a + b
    composite = (a * np.asarray(center_a) + b * np.asarray(center_b)) / p
    pc = composite - np.asarray(nucleus)
    e_x = hermite_coefficients(powers_a[0], powers_b[0], a, b, center_a[0] - center_b[0])
    e_y = hermite_coefficients(powers_a[1], powers_b[1], a, b, center_a[1] - center_b[1])
    e_z = hermite_coefficients(powers_a[2], powers_b[2], a, b, center_a[2] - center_b[2])
    total = 0.0
    for t, ex in enumerate(e_x):
        for u, ey in enumerate(e_y):
            for v, ez in enumerate(e_z):
                total += ex * ey * ez * hermite_coulomb(t, u, v, 0, p, pc)
    return 2.0 * math.pi / p * total


def eri_primitive(
    a, powers_a, center_a, b, powers_b, center_b,
    c, powers_c, center_c, d, powers_d, center_d,
) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    p_center = (a * np.asarray(center_a) + b * np.asarray(center_b)) / p
    q_center = (c * np.asarray(center_c) + d * np.asarray(center_d)) / q
    pq = p_center - q_center

    e1 = [
        hermite_coefficients(
            powers_a[ax], powers_b[ax], a, b, center_a[ax] - center_b[ax]
        )
        for ax in range(3)
    ]
    e2 = [
        hermite_coefficients(
            powers_c[ax], powers_d[ax], c, d, center_c[ax] - center_d[ax]
        )
        for ax in range(3)
    ]
    total = 0.0
    for t, ex1 in enumerate(e1[0]):
        for u, ey1 in enumerate(e1[1]):
            for v, ez1 in enumerate(e1[2]):
                w1 = ex1 * ey1 * ez1
                if w1 == 0.0:
                    continue
                for tt, ex2 in enumerate(e2[0]):
                    for uu, ey2 in enumerate(e2[1]):
                        for vv, ez2 in enumerate(e2[2]):
                            w2 = ex2 * ey2 * ez2
                            if w2 == 0.0:
                                continue
                            sign = -1.0 if (tt + uu + vv) % 2 else 1.0
                            total += (
                                w1
                                * w2
                                * sign
                                * hermite_coulomb(
                                    t + tt, u + uu, v + vv, 0, alpha, pq
                                )
                            )
    pref = 2.0 * math.pi**2.5 / (p * q * math.sqrt(p + q))
    return pref * total


def _contract2(func_a: BasisFunction, func_b: BasisFunction, kernel) -> float:
    total = 0.0
    for ca, aa in zip(func_a.coefficients, func_a.exponents):
        for cb, bb in zip(func_b.coefficients, func_b.exponents):
            total += ca * cb * kernel(aa, bb)
    return total


def overlap_contracted(func_a, func_b) -> float:
    return _contract2(
        func_a,
        func_b,
        lambda a, b: overlap_primitive(
            a, func_a.powers, func_a.center, b, func_b.powers, func_b.center
        ),
    )


def kinetic_contracted(func_a, func_b) -> float:
    return _contract2(
        func_a,
        func_b,
        lambda a, b: kinetic_primitive(
            a, func_a.powers, func_a.center, b, func_b.powers, func_b.center
        ),
    )


def nuclear_contracted(func_a, func_b, nucleus) -> float:
    return _contract2(
        func_a,
        func_b,
        lambda a, b: nuclear_primitive(
            a, func_a.powers, func_a.center, b, func_b.powers, func_b.center, nucleus
        ),
    )


def eri_contracted(fa, fb, fc, fd) -> float:
    total = 0.0
    for ca, aa in zip(fa.coefficients, fa.exponents):
        for cb, ab_ in zip(fb.coefficients, fb.exponents):
            for cc, ac in zip(fc.coefficients, fc.exponents):
                for cd, ad in zip(fd.coefficients, fd.exponents):
                    total += ca * cb * cc * cd * eri_primitive(
                        aa, fa.powers, fa.center,
                        ab_, fb.powers, fb.center,
                        ac, fc.powers, fc.center,
                        ad, fd.powers, fd.center,
                    )
    return total


def integral_tables(functions, geometry, charges):
    """(S, T, V, ERI) over the contracted basis.

    ERI is in chemist notation (ab|cd), full 4-index array with the
    8-fold permutational symmetry used to fill it.
    """
    m = len(functions)
    s = np.empty((m, m))
    t = np.empty((m, m))
    v = np.zeros((m, m))
    for i in range(m):
        for j in range(i, m):
            s[i, j] = s[j, i] = overlap_contracted(functions[i], functions[j])
            t[i, j] = t[j, i] = kinetic_contracted(functions[i], functions[j])
            nuclear = 0.0
            for (element, center), charge in zip(geometry, charges):
                nuclear -= charge * nuclear_contracted(
                    functions[i], functions[j], center
                )
            v[i, j] = v[j, i] = nuclear

    eri = np.zeros((m, m, m, m))
    for i in range(m):
        for j in range(i + 1):
            for k in range(m):
                for l in range(k + 1):
                    if (i * (i + 1) // 2 + j) < (k * (k + 1) // 2 + l):
                        continue
                    value = eri_contracted(
                        functions[i], functions[j], functions[k], functions[l]
                    )
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            eri[a, b, c, d] = value
                            eri[c, d, a, b] = value
    return s, t, v, eri
