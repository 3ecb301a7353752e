"""
Quick demo of the even/odd cancellation battery
Run this to see example output without going through the CLI
"""

from aberration_dip import CancellationChecker, CrystalParams, SetupGeometry, Verdict
from aberration_dip.sweep import SweepDashboard, run_sweep

crystal = CrystalParams()
geometry = SetupGeometry()

# Score the built-in battery at 0.5 um peak-to-valley
checker = CancellationChecker(crystal, geometry, tau_points=101)
results = checker.run()

print(CancellationChecker.generate_report(results))

print("\n" + "=" * 80)
print("ODD-MODE DETAILS")
print("=" * 80)

for result in results:
    if result.m % 2:
        print(f"\n🔬 {result.name} (n={result.n}, m={result.m})")
        print(f"   Coefficient: {result.coeff_rad:.3f} rad | Odd excursion: {result.odd_excursion:.3f} rad")
        print(f"   Residual vs flat: {result.residual:.3e} | Verdict: {result.verdict.value}")
        if result.verdict is not Verdict.PASS:
            print(f"   {result.note}")

# Coma amplitude sweep
sweep, _ = run_sweep((3, 1), [0.2, 0.4, 0.6, 0.75], crystal, geometry, tau_points=101)
print(SweepDashboard.generate_comparison_table(sweep))
