"""Dense-matrix oracles shared by the test modules. Deliberately naive."""
import numpy as np

# one-line verdicts from test_acceptance, printed at the end of the run
ACCEPTANCE: list[str] = []


def crandn(g, shape):
    return (g.standard_normal(shape) + 1j * g.standard_normal(shape)) / np.sqrt(2)


def inv_sqrt_hermitian(A):
    w, V = np.linalg.eigh(A)
    return (V / np.sqrt(w)) @ V.conj().T


def eig_capacity_nats(Xi, H, P):
    """(1/J) sum log eig(I + P Xi^-1/2 H H^* Xi^-1/2)."""
    S = inv_sqrt_hermitian(Xi)
    B = np.eye(len(Xi)) + P * S @ H @ H.conj().T @ S
    w = np.linalg.eigvalsh(0.5 * (B + B.conj().T))
    return float(np.sum(np.log(w)) / len(Xi))


def explicit_sinr_trace(Xi, Ltilde, G, P):
    S = inv_sqrt_hermitian(Xi)
    A = Ltilde[:, None] * G
    Pm = P * S @ A @ A.conj().T @ S
    return float(np.trace(Pm).real)


def random_instance(g, J, K, n_out=None, N0=None):
    """Random well-conditioned channel instance as raw arrays."""
    from udncap.channel import ChannelInstance
    n_out = int(g.integers(1, 3 * J + 1)) if n_out is None else n_out
    N0 = float(g.uniform(0.05, 1.0)) if N0 is None else N0
    L = g.uniform(0.0, 1.0, (J, K))
    G = crandn(g, (J, K))
    Ho = g.uniform(0.0, 1.0, (J, n_out)) * crandn(g, (J, n_out))
    Xi = N0 * np.eye(J) + Ho @ Ho.conj().T
    Xi = 0.5 * (Xi + Xi.conj().T)
    return ChannelInstance(L, G, Xi, L.mean(axis=1), n_interferers=n_out)


def mc_diagonal_error(L, C, draws):
    """Monte-Carlo E||L o G - diag(c) G||_F^2 for each candidate row c of C.

    ``draws`` has shape (n, J, K). Returns (means, standard errors).
    """
    absg2 = np.abs(draws) ** 2  # (n, J, K)
    out_mean, out_se = [], []
    for c in C:
        e = (absg2 * (L - c[:, None]) ** 2).sum(axis=(1, 2))
        out_mean.append(e.mean())
        out_se.append(e.std(ddof=1) / np.sqrt(len(e)))
    return np.array(out_mean), np.array(out_se)
