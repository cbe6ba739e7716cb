"""Depth at arbitrary query points by one-point insertion.

Computes normalized degree, H-iterate, and coreness depth along a line of
query points that are not in the sample, and checks the identity that at a
sample point the degree depth equals (deg_i + 1)/N.
"""

import os

import numpy as np

import depthcore as dc

OUT = os.path.join(os.path.dirname(__file__), "demo_out")
os.makedirs(OUT, exist_ok=True)

model = dc.preset("fig1d-mixture6")
cloud = dc.sample(model, 20000, seed=11)
r = 0.13
index = dc.build_index(cloud, r)
graph = dc.build_graph(cloud, r)

# depth at sample point 0 from raw degrees: (deg+1)/N
N = dc.normalization(cloud.n, r, cloud.dim)
d0 = dc.point_depth(cloud, index, cloud.points[0], r, "degree")
assert d0 == (dc.degree_scores(graph).values[0] + 1) / N

X = np.linspace(-8.0, 8.0, 321)[:, None]
prof_deg = dc.depth_profile(cloud, index, X, r, "degree")

h4 = dc.iterated_h(graph, 4)
prof_h5 = dc.depth_profile(cloud, index, X, r, "h_iterate(5)", scores=h4)

core, _ = dc.coreness_by_iteration(graph)
prof_core = dc.depth_profile(cloud, index, X, r, "coreness", scores=core)

# depth orders the modes the way the density does
f = np.array([dc.evaluate(model, x) for x in X])
top = np.argsort(prof_deg)[-3:]
print("deepest query points:", np.sort(X[top, 0]))
print("density argmax:", X[np.argmax(f), 0])

path = os.path.join(OUT, "depth-profiles.csv")
with open(path, "w") as fh:
    fh.write("x,f,depth_degree,depth_h5,depth_coreness\n")
    for i in range(X.shape[0]):
        fh.write("%.17g,%.17g,%.17g,%.17g,%.17g\n"
                 % (X[i, 0], f[i], prof_deg[i], prof_h5[i], prof_core[i]))
print("wrote", path)
