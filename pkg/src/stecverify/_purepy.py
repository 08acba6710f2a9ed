"""Pure numpy implementations of the compiled kernels.

Same contracts as ``_kernels``; results agree to rounding, not bitwise.
"""

import numpy as np

MAX_SWEEPS = 50


def jacobi_eigh3(blocks, rel_tol=1e-14):
    a = np.array(blocks, dtype=float, copy=True)
    n = a.shape[0]
    v = np.broadcast_to(np.eye(3), (n, 3, 3)).copy()
    norm2 = np.einsum("nij,nij->n", a, a)
    for _ in range(MAX_SWEEPS):
        off2 = 2.0 * (a[:, 0, 1] ** 2 + a[:, 0, 2] ** 2 + a[:, 1, 2] ** 2)
        active = (off2 > rel_tol**2 * norm2) & (off2 != 0.0)
        if not active.any():
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[:, p, q]
            rot = active & (apq != 0.0)
            if not rot.any():
                continue
            idx = np.nonzero(rot)[0]
            apq = apq[idx]
            # tiny apq overflows theta to inf, which correctly gives t = 0
            with np.errstate(over="ignore", divide="ignore"):
                theta = (a[idx, q, q] - a[idx, p, p]) / (2.0 * apq)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            sub = a[idx]
            rp, rq = sub[:, p, :].copy(), sub[:, q, :].copy()
            sub[:, p, :] = c[:, None] * rp - s[:, None] * rq
            sub[:, q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = sub[:, :, p].copy(), sub[:, :, q].copy()
            sub[:, :, p] = c[:, None] * cp - s[:, None] * cq
            sub[:, :, q] = s[:, None] * cp + c[:, None] * cq
            sub[:, p, q] = 0.0
            sub[:, q, p] = 0.0
            a[idx] = sub
            vs = v[idx]
            vp, vq = vs[:, :, p].copy(), vs[:, :, q].copy()
            vs[:, :, p] = c[:, None] * vp - s[:, None] * vq
            vs[:, :, q] = s[:, None] * vp + c[:, None] * vq
            v[idx] = vs
    return np.diagonal(a, axis1=1, axis2=2).copy(), v


def regulated_sums(eps, weight, cutoffs):
    eps = np.asarray(eps, dtype=float)
    weight = np.asarray(weight, dtype=float)
    we = weight * eps
    return np.array([np.sum(we * np.exp(-eps * s)) for s in np.asarray(cutoffs, dtype=float)])
