"""Pure-numpy fallback for the compiled kernels in ``_ckernels.pyx``."""
import numpy as np


def rk4_products(C, T, H, out):
    """Integrate U' = U A(t), U(0) = 1 with classical RK4 for a batch of samples.

    C : (N, nsteps, 3, g) generator coefficients of A at the start, midpoint
        and end of every step.
    T : (g, j, j) complex generators.
    H : (nsteps,) step sizes.
    out : (N, j, j) complex, overwritten with the holonomies.
    """
    N = C.shape[0]
    j = T.shape[1]
    U = np.broadcast_to(np.eye(j, dtype=complex), (N, j, j)).copy()
    for k in range(C.shape[1]):
        h = H[k]
        G = np.einsum("nsa,aij->snij", C[:, k], T)
        k1 = U @ G[0]
        k2 = (U + 0.5 * h * k1) @ G[1]
        k3 = (U + 0.5 * h * k2) @ G[1]
        k4 = (U + h * k3) @ G[2]
        U += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    out[...] = U
    return out
