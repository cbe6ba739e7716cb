"""Experiment harness: a small convergence sweep and the k_inf diagnostics.

Runs a reduced version of each experiment kind and prints where the CSVs
land.  The full presets used in the acceptance runs are available through
``default_config`` and the ``depthcore experiment`` command.
"""

import os

import depthcore as dc

OUT = os.path.join(os.path.dirname(__file__), "demo_out")
os.makedirs(OUT, exist_ok=True)

model_doc = dc.serialize_density_config(dc.preset("fig1d-mixture6"))

# vanishing-radius regime: degree -> f, coreness -> C0
cfg = dc.ExperimentConfig(
    density=model_doc,
    n_values=(1000, 4000),
    r_rule=2.0,
    k_values=(float("inf"),),
    repetitions=3,
    seed_base=1,
    regime="rzero",
    name="demo-converge",
)
records = dc.run_convergence(cfg, out_path=os.path.join(OUT, "converge.csv"))
for n in cfg.n_values:
    errs = sorted(rec.sup_error_degree for rec in records if rec.n == n)
    print("n=%5d  median degree error %.4f" % (n, errs[len(errs) // 2]))

# rate probe: coreness error against degree error on log-log axes
rate_cfg = dc.ExperimentConfig(
    density=model_doc,
    n_values=(200, 500, 1000),
    r_rule=2.0,
    k_values=(float("inf"),),
    repetitions=3,
    seed_base=5,
    regime="rzero",
    name="demo-rate",
)
_, pearson, slope = dc.run_rate_sweep(rate_cfg, out_path=os.path.join(OUT, "rate.csv"))
print("rate sweep: pearson=%.3f slope=%.3f" % (pearson, slope))

# k_inf against its bounds
kmax_cfg = dc.ExperimentConfig(
    density=model_doc,
    n_values=(200, 500),
    r_rule=(0.2, 0.5),
    k_values=(float("inf"),),
    repetitions=3,
    seed_base=9,
    regime="rfixed",
    name="demo-kmax",
)
rows, violations = dc.run_kmax_sweep(kmax_cfg, out_path=os.path.join(OUT, "kmax.csv"))
print("kmax sweep: %d rows, %d conjecture violations" % (len(rows), len(violations)))
print("CSVs in", OUT)
