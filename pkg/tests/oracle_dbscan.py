"""Brute-force density-connectivity oracle for DBSCAN comparisons.

Independent of geofpe.metrics.dbscan: builds the full distance matrix, finds
core points, takes the transitive closure of core-core adjacency by boolean
matrix powers, and assigns border points to the lowest-numbered adjacent
cluster (which is what a scan-order DBSCAN does, since clusters are grown one
at a time).
"""

import numpy as np


def dbscan_oracle(points, eps, min_pts):
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n == 0:
        return []
    diff = pts[:, None, :] - pts[None, :, :]
    adj = (diff**2).sum(axis=-1) <= eps * eps
    core = adj.sum(axis=1) >= min_pts  # neighbourhood includes the point itself

    reach = adj & core[:, None] & core[None, :]
    closure = reach | np.eye(n, dtype=bool)
    while True:
        nxt = closure | ((closure.astype(np.uint8) @ closure.astype(np.uint8)) > 0)
        if (nxt == closure).all():
            break
        closure = nxt

    labels = [-1] * n
    cid = 0
    for i in range(n):
        if not core[i] or labels[i] != -1:
            continue
        members = np.flatnonzero(closure[i] & core)
        for m in members:
            labels[m] = cid
        cid += 1
    for i in range(n):
        if core[i]:
            continue
        adjacent = [labels[j] for j in np.flatnonzero(adj[i] & core)]
        if adjacent:
            labels[i] = min(adjacent)
    return labels
