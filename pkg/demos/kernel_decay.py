"""How fast does the memory term of the slow equation fade?

Run: python demos/kernel_decay.py

Integrating out the fast variables leaves a convolution kernel G(t, xi, eta)
in the slow equation. For ``osc3`` the fast block only rotates, so there is
no damping at all; the kernel still vanishes like log(eta)/eta because the
rotation averages out. The table shows ||G|| next to the explicit bound.
"""

import math

from relaxlab import block_decompose, coupling_kernel, g_bound_check, operator_norm, osc3
from relaxlab.bounds import PreconditionError

system = osc3()
dec = block_decompose(system)
t = 1.0
print(f"{'xi':>4} {'eta':>8} {'||G||':>11} {'||G|| eta/(xi log eta)':>24} {'bound':>11}")
for xi in (1.0, 3.0, 5.0):
    for eta in (1e2, 1e3, 1e4):
        g = operator_norm(coupling_kernel(system, dec, t, [xi], eta))
        try:
            bound = f"{g_bound_check(system, dec, t, [xi], eta).rhs:11.3e}"
        except PreconditionError:  # eta below the validity threshold of the estimate
            bound = "n/a"
        print(f"{xi:4g} {eta:8g} {g:11.3e} {g * eta / (xi * math.log(eta)):24.4f} {bound:>11}")
