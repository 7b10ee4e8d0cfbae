"""
Bayesian surprise on a toy stream
=================================

A Dirichlet model over ten bins, updated one observation at a time.
"""

import numpy as np

from isosurprise import (BinningSpec, DirichletFeatureModel, SurpriseConfig, surprise_series,
                         uniform_prior)

model = DirichletFeatureModel("area", BinningSpec(10, 0.0, 10.0), uniform_prior(10))

# the same value again and again: the model habituates
seen = [model.observe(3.2) for _ in range(8)]
print("repeated value :", " ".join("%.3f" % s for s in seen))

# something new stands out against the settled belief
print("novel value    : %.3f" % model.observe(8.7))
print("concentrations :", model.current.alpha)

# a whole matrix at once: one feature jumps in the middle, the other is
# constant (a degenerate column sits in bin 0 and simply habituates)
rng = np.random.default_rng(0)
x = np.concatenate([rng.normal(10, 0.3, 30), rng.normal(25, 0.3, 5), rng.normal(10, 0.3, 30)])
y = np.ones(len(x))
res = surprise_series(np.column_stack([x, y]), names=("area", "circularity"),
                      config=SurpriseConfig(k=10))
# early steps are all new to the model, so look past a short warm-up
print("jump detected at step", 10 + int(np.argmax(res.combined[10:])))

# the predictive ("categorical") variant scores the same stream
cat = surprise_series(np.column_stack([x, y]), names=("area", "circularity"),
                      config=SurpriseConfig(mode="categorical"))
print("categorical variant: step", 10 + int(np.argmax(cat.combined[10:])))
