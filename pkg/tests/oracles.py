"""Brute-force references used to freeze derived values in the tests."""

import itertools


def span_set(rows, q, ncols):
    """Every Z/q-combination of ``rows``, enumerated."""
    out = set()
    for cs in itertools.product(range(q), repeat=len(rows)):
        v = [0] * ncols
        for c, r in zip(cs, rows):
            for j in range(ncols):
                v[j] = (v[j] + c * r[j]) % q
        out.add(tuple(v))
    if not rows:
        out.add(tuple([0] * ncols))
    return out


def kernel_set(rows, q, ncols):
    """All x with x . rows = 0."""
    out = set()
    for xs in itertools.product(range(q), repeat=len(rows)):
        if all(sum(x * r[j] for x, r in zip(xs, rows)) % q == 0 for j in range(ncols)):
            out.add(xs)
    return out


def dense_d(complex_, M, i):
    """Differential on the multidegree M piece, from LogForm.d on basis forms."""
    src = complex_.words(M, i)
    dst = complex_.words(M, i + 1)
    mat = []
    for S in src:
        w = complex_.reduce(complex_.basis_form(M, S).d())
        mat.append(complex_.vector(w, M, i + 1) if dst else [])
    return src, dst, mat


def cohomology_order(complex_, M, i):
    """|H^i| at M as |Z| / |B| by enumerating kernels and images."""
    q = complex_.ring.q
    _, dst, d_i = dense_d(complex_, M, i)
    prev, _, d_prev = dense_d(complex_, M, i - 1) if i > 0 else ((), None, [])
    n = len(complex_.words(M, i))
    Z = kernel_set(d_i, q, len(dst)) if dst else set(itertools.product(range(q), repeat=n))
    B = span_set(d_prev, q, n) if prev else {tuple([0] * n)}
    return len(Z) // len(B)
