"""
The Hessian at the critical points.

The coordinate subspaces of each type are critical for the energy.  The
Hessian there has eigenvalues 0 and +-4 only, and its kernel is exactly the
tangent space to the orbit of the unitary group, so the energy is
Morse-Bott.  The closed form is compared with a finite-difference Hessian.
"""

import numpy as np

from sympgrass import construct_subspace_of_type, hessian_at_critical, hessian_report, make_standard_space, signatures
from sympgrass.oracles import fd_hessian

for n in (1, 2, 3):
    for sig in signatures(n):
        W = construct_subspace_of_type(make_standard_space(n), sig)
        rep = hessian_report(W)
        values = sorted({float(v) for v in np.round(rep.eigenvalues, 8)})
        H_fd, frame = fd_hessian(W)
        if frame:
            images = [hessian_at_critical(W, E).matrix for E in frame]
            H = np.array([[np.sum(a * b) for b in images] for a in frame])
            fd_err = f"{np.max(np.abs(H - H_fd)):.1e}"
        else:
            fd_err = "-"
        print(
            f"n={n} {str(sig):>9}  eigenvalues {values}  kernel {rep.kernel_dim} "
            f"(expected {rep.expected_kernel_dim})  fd err {fd_err}"
        )
