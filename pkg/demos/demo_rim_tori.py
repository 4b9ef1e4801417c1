"""Rim tori appear when the H1 maps do not jointly surject onto H1 of the surface."""

from gfsum.fibresum import CanonicalClassError, canonical_class, rim_tori_group
from gfsum.pipeline import builtin_scenario, report_text, run_pipeline

for name in ("Y", "X"):
    (report,) = run_pipeline(builtin_scenario(name))
    res = report.result
    print(f"{name}: rim tori = {rim_tori_group(res.spec)}, splitting = {res.splitting.ranks()}")
    try:
        canonical_class(res.spec, res)
    except CanonicalClassError as exc:
        print("   ", exc)

# The text report states the same thing.
(x_report,) = run_pipeline(builtin_scenario("X"))
print([line for line in report_text(x_report.to_dict()).splitlines() if line.startswith("canonical")])
