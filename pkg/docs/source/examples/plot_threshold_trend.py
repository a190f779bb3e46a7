"""
Unweighting threshold versus density
====================================

The threshold that best binarizes ``FSZE`` moves with the density of the
input graph. :class:`szemeredi_codec.ThresholdTrend` fits a LOWESS curve of
``t*`` on density, with a bootstrap band, inside ``seaborn.objects``.
"""

import seaborn.objects as so
import szemeredi_codec as szc

spec = szc.ExperimentSpec(
    sizes=(200,),
    internoise_levels=(0.1, 0.2, 0.3, 0.4, 0.5),
    clusters=5,
    repetitions=2,
    codec=szc.CodecConfig(eps_grid=(0.25, 0.3, 0.35)),
    seed=3,
    processes=1,
)
table = szc.run_experiment(spec, progress=False).table.dropna(subset=["threshold"])

# --- Trend with a 90% band ---------------------------------------------------
(
    so.Plot(table, x="density", y="threshold")
    .add(so.Dot(alpha=0.5))
    .add(so.Line(), trend := szc.ThresholdTrend(frac=0.8, num_bootstrap=100, alpha=0.1, seed=0))
    .add(so.Band(), trend)
    .label(title="Optimal unweighting threshold", x="Graph density", y="t*")
    .plot()
)

# --- The same curve as a rule for graphs without ground truth ---------------
rule = szc.ThresholdRule(frac=0.8).fit(table)
print(f"threshold at density 0.3: {rule.rule(0.3):.3f}")
