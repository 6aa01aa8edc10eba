import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from esrl.profile import CodeProfile, tail_matrix


def random_profile(rng, m, n, omega, *, m_prime=None, n_prime=None, rho=0, Z=0,
                   density=0.5, enforce_degrees=False):
    """Random structurally consistent profile for property tests.

    Ensures every row and column has at least one edge so downstream graph
    code never sees isolated nodes.  Does not aim to satisfy the stricter
    degree constraints checked by validate().
    """
    if m_prime is None:
        m_prime = m
    if n_prime is None:
        n_prime = n
    while True:
        B = (rng.random((m, n)) < density).astype(np.int64)
        # no empty rows or columns
        for c in range(m):
            if not B[c].any():
                B[c, rng.integers(n)] = 1
        for v in range(n):
            if not B[:, v].any():
                B[rng.integers(m), v] = 1
        B[:m_prime, n_prime:] = 0
        for c in range(m_prime, m):
            d = n_prime + (c - m_prime)
            if d < n:
                B[c, d] = 1
                B[c, d + 1:] = 0
        if enforce_degrees:
            B[:, :rho] = 1
            for v in range(rho, n_prime):
                while B[:, v].sum() < 3:
                    B[rng.integers(m), v] = 1
        if B.sum(axis=0).min() >= 1 and B.sum(axis=1).min() >= 1:
            break
    T = np.where(B == 1, rng.integers(0, omega + 1, size=(m, n)), -1)
    for c in range(m_prime, m):
        d = n_prime + (c - m_prime)
        if d < n:
            T[c, d] = 0
    if Z > 0:
        P = np.where(B == 1, rng.integers(0, Z, size=(m, n)), -1)
    else:
        P = np.where(B == 1, 0, -1)
    return CodeProfile(m_prime=m_prime, n_prime=n_prime, m=m, n=n,
                       omega=omega, rho=rho, Z=Z, B=B, T=T, P=P,
                       Q=tail_matrix(m, omega))


def encodable_profile(rng, m, n, omega, *, m_prime=None, n_prime=None, rho=0,
                      Z=1, density=0.5, enforce_degrees=False):
    """Random profile whose B_0 parity square is unit lower triangular.

    Needed by the systematic encoder: within each batch the parity columns
    k..n-1 (k = n - m) must carry a unit diagonal with label 0 and nothing
    above the diagonal in B_0.
    """
    p = random_profile(rng, m, n, omega, m_prime=m_prime, n_prime=n_prime,
                       rho=rho, Z=Z, density=density,
                       enforce_degrees=enforce_degrees)
    B, T, P = p.B.copy(), p.T.copy(), p.P.copy()
    k = n - m
    assert p.n_prime - p.m_prime == k
    for c in range(p.m_prime):
        if not B[c, k + c]:
            B[c, k + c] = 1
            P[c, k + c] = rng.integers(Z) if Z > 0 else 0
        T[c, k + c] = 0
        for j in range(c + 1, p.m_prime):
            if B[c, k + j]:
                if omega == 0:
                    B[c, k + j] = 0
                    T[c, k + j] = -1
                    P[c, k + j] = -1
                else:
                    T[c, k + j] = max(1, int(T[c, k + j]))
    return CodeProfile(m_prime=p.m_prime, n_prime=p.n_prime, m=m, n=n,
                       omega=omega, rho=rho, Z=Z, B=B, T=T, P=P, Q=p.Q)
