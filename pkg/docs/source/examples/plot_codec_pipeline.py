"""
Compressing a planted-cluster graph
===================================

This example draws a graph of eight noisy cliques, compresses it with
:func:`szemeredi_codec.run_codec` and shows the input next to the
reconstruction ``SZE`` and its median filtered version ``FSZE``.
"""

import matplotlib.pyplot as plt
import szemeredi_codec as szc

# A small graph keeps the docs build fast
params = szc.SynthParams(n=400, clusters=8, internoise=0.2, seed=7)
g, gt, labels = szc.generate(params)

cfg = szc.CodecConfig(eps_grid=(0.2, 0.25, 0.3, 0.35), seed=7)
result = szc.run_codec(g, cfg, reference=gt, labels=labels)
report = result.report

# --- G, SZE and FSZE side by side ------------------------------------------
fig, axes = plt.subplots(1, 3, figsize=(12, 4))
for ax, (name, matrix) in zip(axes, [("G", g), ("SZE", result.sze), ("FSZE", result.fsze)]):
    ax.imshow(matrix.weights, cmap="gray_r", vmin=0, vmax=1)
    ax.set(title=name, xticks=[], yticks=[])
fig.suptitle(
    f"k={report.k_classes}, eps={report.eps:.3f}, "
    f"KVS-ARI={report.kvs_ari:.3f}, l2={report.l2:.3f}"
)
plt.show()

# --- Binarizing FSZE against the ground truth -------------------------------
t, ufsze = szc.threshold_search(result.fsze, gt)
print(f"t* = {t:.2f}, l2(UFSZE, GT) = {szc.l2_dist(ufsze, gt):.4f}")
print(f"compression ratio = {result.compressed.compression_ratio():.2f}")
