"""The slow variables converge at the rate eps |log eps|.

Run: python demos/relaxation_limit.py

Seeded H^2 initial data on the periodic interval is evolved exactly in
Fourier space, once with the full stiff system and once with the reduced
equation. The L^2 error of the slow variables is split at the frequency
cutoff ``beta_tilde / eps``; the last column divides the error by
eps |log eps| and should stay roughly flat.
"""

from relaxlab import convergence_study, jinxin, make_initial_data, osc3

for system in (jinxin(1.0, 0.5), osc3()):
    U0 = make_initial_data(d=1, n=system.n, N=64, s=2.0, seed=0)
    summary = convergence_study(system, None, U0, 1.0, [1e-1, 1e-2, 1e-3, 1e-4])
    print(f"== {system.name}")
    print(f"{'eps':>8} {'L2 error':>11} {'low freq':>11} {'high freq':>11} {'ratio':>8}")
    for r in summary.records:
        print(f"{r.epsilon:8g} {r.l2_error:11.3e} {r.low_freq_error:11.3e} {r.high_freq_error:11.3e} {r.rate_ratio:8.3f}")
    print(f"   decreasing: {summary.error_decreasing}, ratio spread max/min: {summary.rate_spread:.2f}\n")
