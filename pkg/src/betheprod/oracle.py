"""Brute-force monodromy matrix of the inhomogeneous twisted XXX_1/2 chain.

Site ``n`` carries the Lax operator ``L_n(u) = (u - theta_n - i eps/2) + i eps P``
acting on auxiliary space (x) site ``n``; the monodromy is the ordered product
``L_L(u) ... L_1(u)`` in auxiliary space.  The half shift makes the vacuum
eigenvalues ``a(u) = Q_theta(u + i eps/2)`` and ``d(u) = Q_theta(u - i eps/2)``.

Basis state 0 on a site is spin up (the pseudovacuum), 1 is spin down.  A
state vector of length ``2**L`` is reshaped to ``(2,) * L`` with site 1 on the
leading axis.

Operators are applied matrix-free (cost ``O(L 2**L)`` per application); the
explicit matrices from :func:`build_monodromy` are dense up to ``DENSE_MAX_L``
sites and CSR sparse above (nonzeros only inside magnon-number blocks).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import TooLarge
from .model import InhomogeneousXXXModel, as_roots

MAX_L = 14
DENSE_MAX_L = 10

_ENTRY = {"A": (0, 0), "B": (0, 1), "C": (1, 0), "D": (1, 1)}


@dataclass(frozen=True)
class ChainSpec:
    theta: np.ndarray
    epsilon: float = 1.0
    kappa: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "theta", as_roots(self.theta))
        object.__setattr__(self, "kappa", complex(self.kappa))
        if self.theta.size == 0:
            raise ValueError("chain needs at least one site")
        if self.theta.size > MAX_L:
            raise TooLarge(f"L={self.theta.size} exceeds the oracle cap {MAX_L}")

    @property
    def L(self) -> int:
        return self.theta.size

    @classmethod
    def from_model(cls, model: InhomogeneousXXXModel) -> "ChainSpec":
        return cls(theta=model.theta, epsilon=model.epsilon, kappa=model.kappa)

    def model(self) -> InhomogeneousXXXModel:
        return InhomogeneousXXXModel(self.theta, kappa=self.kappa, epsilon=self.epsilon)


def lax_blocks(chain: ChainSpec, u: complex, site: int) -> np.ndarray:
    """Lax operator at ``site`` as ``lax[a, c]`` = 2x2 operator on the site."""
    shift = u - chain.theta[site] - 0.5j * chain.epsilon
    ie = 1j * chain.epsilon
    lax = np.zeros((2, 2, 2, 2), dtype=complex)
    for a in range(2):
        lax[a, a] += shift * np.eye(2)
        for c in range(2):
            # P = sum_ab E_ab (x) E_ba  ->  entry (a, c) acts as E_ca on the site
            lax[a, c, c, a] += ie
    return lax


def apply_entry(chain: ChainSpec, u: complex, entry: str, psi: np.ndarray) -> np.ndarray:
    """Apply monodromy entry ``entry`` (one of A, B, C, D) at rapidity ``u`` to ``psi``.

    ``psi`` has shape ``(2**L,)`` or ``(2**L, k)``; columns are treated independently.
    """
    a_out, b_in = _ENTRY[entry]
    L = chain.L
    psi = np.asarray(psi, dtype=complex)
    batch = psi.shape[1:]
    state = psi.reshape((2,) * L + batch)
    phi = np.zeros((2,) + state.shape, dtype=complex)
    phi[b_in] = state
    for n in range(L):
        lax = lax_blocks(chain, u, n)
        # contract aux index c and site index s of phi[c, ..., s_n, ...]
        phi = np.moveaxis(phi, n + 1, 1)
        phi = np.einsum("acts,cs...->at...", lax, phi)
        phi = np.moveaxis(phi, 1, n + 1)
    return phi[a_out].reshape(psi.shape)


def vacuum(chain: ChainSpec) -> np.ndarray:
    omega = np.zeros(2 ** chain.L, dtype=complex)
    omega[0] = 1.0
    return omega


def magnon_number(L: int) -> np.ndarray:
    idx = np.arange(2 ** L)
    return np.array([bin(i).count("1") for i in idx])


def build_monodromy(chain: ChainSpec, u: complex):
    """Explicit ``(A, B, C, D)`` at rapidity ``u``.

    Dense arrays up to ``DENSE_MAX_L`` sites, CSR matrices beyond.
    """
    if chain.L > MAX_L:
        raise TooLarge(f"L={chain.L} exceeds the oracle cap {MAX_L}")
    if chain.L <= DENSE_MAX_L:
        eye = np.eye(2 ** chain.L, dtype=complex)
        return tuple(apply_entry(chain, u, e, eye) for e in "ABCD")
    blocks = [[sp.identity(1, dtype=complex, format="csr") if a == b
               else sp.csr_matrix((1, 1), dtype=complex) for b in range(2)] for a in range(2)]
    for n in range(chain.L):
        lax = lax_blocks(chain, u, n)
        blocks = [[sum(sp.kron(blocks[c][b], sp.csr_matrix(lax[a, c]), format="csr")
                       for c in range(2)) for b in range(2)] for a in range(2)]
    (A, B), (C, D) = blocks
    return A.tocsr(), B.tocsr(), C.tocsr(), D.tocsr()


def bethe_vector(chain: ChainSpec, u) -> np.ndarray:
    """``prod_j B(u_j) |Omega>``."""
    psi = vacuum(chain)
    for uj in as_roots(u):
        psi = apply_entry(chain, uj, "B", psi)
    return psi


def transfer_apply(chain: ChainSpec, v: complex, psi: np.ndarray) -> np.ndarray:
    """Twisted transfer matrix ``A(v) + kappa D(v)`` applied to ``psi``."""
    return apply_entry(chain, v, "A", psi) + chain.kappa * apply_entry(chain, v, "D", psi)


def transfer_matrix(chain: ChainSpec, v: complex):
    A, _, _, D = build_monodromy(chain, v)
    return A + chain.kappa * D


def oracle_scalar_product(chain: ChainSpec, v, u) -> complex:
    """Bilinear form ``<Omega| prod C(v_j) prod B(u_j) |Omega>``."""
    u = as_roots(u)
    v = as_roots(v)
    if u.size != v.size:
        raise ValueError("both states need the same number of magnons")
    if u.size > chain.L:
        return 0.0j
    psi = bethe_vector(chain, u)
    for vj in v:
        psi = apply_entry(chain, vj, "C", psi)
    return complex(psi[0])


def oracle_transfer_check(chain: ChainSpec, state, v: complex) -> float:
    """``|| T(v)|u>/a(v) - t(v)|u> || / || |u> ||`` for the state's rapidities.

    ``t(v)`` is the eigenvalue normalized by the vacuum eigenvalue ``a(v)``,
    as returned by :func:`betheprod.bethe.transfer_eigenvalue`.
    """
    from .bethe import BetheState, transfer_eigenvalue

    model = chain.model().functions()
    if not isinstance(state, BetheState):
        state = BetheState.from_roots(model, state)
    psi = bethe_vector(chain, state.u)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("Bethe vector vanishes identically")
    a_v = model.a(v)
    t_v = transfer_eigenvalue(state, v)
    defect = transfer_apply(chain, v, psi) / a_v - t_v * psi
    return float(np.linalg.norm(defect) / norm)
