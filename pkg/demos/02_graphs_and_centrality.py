"""Neighborhood graphs and the three centrality measures.

Degree, iterated H-index, and coreness on one sampled graph, plus the
iteration count k_inf against its proven and conjectured bounds.
"""

import os

import numpy as np

import depthcore as dc

OUT = os.path.join(os.path.dirname(__file__), "demo_out")
os.makedirs(OUT, exist_ok=True)

model = dc.preset("fig1d-mixture6")
cloud = dc.sample(model, 20000, seed=7)
r = 0.13

graph = dc.build_graph(cloud, r)
print("n=%d, edges=%d, max degree=%d" % (graph.n, graph.n_edges, graph.degrees().max()))

deg = dc.degree_scores(graph)
h1 = dc.iterated_h(graph, 1)
h5 = dc.iterated_h(graph, 5)
core_peel = dc.coreness_bucket(graph)
core_iter, k_inf = dc.coreness_by_iteration(graph)
assert np.array_equal(core_peel.values, core_iter.values)

N = dc.normalization(cloud.n, r, cloud.dim)
print("score ranges (over N = n*omega*r^d = %.1f):" % N)
for s in (deg, h1, h5, core_peel):
    v = s.values
    print("  %-14s min=%d max=%d mean/N=%.4f" % (s.measure, v.min(), v.max(), v.mean() / N))

bounds = dc.kmax_bounds(graph)
print("k_inf=%d, montresor bound=%d, |V| bound=%d" % (k_inf, bounds.montresor_sum, graph.n))
print("conjectured bound diameter*maxdeg=%d (ratio %.1f)"
      % (bounds.conjecture, bounds.conjecture / max(k_inf, 1)))

path = os.path.join(OUT, "coreness-n20000.csv")
dc.save_scores_csv(core_peel, path, normalized=True, norm=N)
print("wrote", path)
