"""How the noise schedule reacts to the estimated SNR.

R falls as SNR grows and Q falls too, so the ratio Q/R, which alone fixes the
steady-state gain, is not monotone: it bottoms out near SNR = sqrt(0.4).
"""

from freqkalman import RefinementConfig
from freqkalman.experiments import sweep_snr
from freqkalman.kalman import covariance_recursion, steady_state_error

sweep = sweep_snr(RefinementConfig(), 0.1, 1000.0, 9)
print(f"{'snr':>10} {'Q':>12} {'R':>12} {'P*':>12} {'K*':>8}")
for i in range(len(sweep["snr"])):
    print(f"{sweep['snr'][i]:10.3g} {sweep['Q'][i]:12.4e} {sweep['R'][i]:12.4e} "
          f"{sweep['P_star'][i]:12.4e} {sweep['K_star'][i]:8.5f}")

# convergence speed depends on Q/R: roughly sqrt(R/Q) steps to mix
for q, r in [(1.0, 1.0), (1e-4, 1.0), (1e-8, 1.0)]:
    target = steady_state_error(q, r)
    for steps in (10, 100, 1000, 10000):
        gap = abs(covariance_recursion(q, r, steps) - target)
        if gap < 1e-9:
            print(f"Q/R={q / r:.0e}: within 1e-9 after {steps} steps (P*={target:.3e})")
            break
    else:
        print(f"Q/R={q / r:.0e}: still {gap:.1e} away after {steps} steps (P*={target:.3e})")
