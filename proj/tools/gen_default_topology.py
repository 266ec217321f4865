#!/usr/bin/env python3
"""Regenerate data/default_topology.edges.

Seeded random geometric graph on 20 nodes, post-edited so that nodes
16, 5, 4, 2, 8, 9, 7 have exactly 1..7 neighbours. Only needed when the
shipped topology version is bumped; the library embeds the committed file.
"""
import math
import random
import sys

import networkx as nx

SEED = 20210
NODES = 20
RADIUS = 0.33
DESIGNATED = {16: 1, 5: 2, 4: 3, 2: 4, 8: 5, 9: 6, 7: 7}
VERSION = 1


def build():
    g0 = nx.random_geometric_graph(NODES, RADIUS, seed=SEED)
    pos = {i + 1: g0.nodes[i]["pos"] for i in g0.nodes}
    g = nx.relabel_nodes(g0, {i: i + 1 for i in g0.nodes})
    dist = lambda a, b: math.dist(pos[a], pos[b])
    free = [v for v in g.nodes if v not in DESIGNATED]

    for node, target in sorted(DESIGNATED.items(), key=lambda kv: kv[1]):
        # Edges between designated nodes are fixed once both are placed, so only
        # free nodes are touched while adjusting.
        while g.degree(node) > target:
            cands = [u for u in g.neighbors(node) if u in free and g.degree(u) > 1]
            u = max(cands, key=lambda u: dist(node, u))
            g.remove_edge(node, u)
        while g.degree(node) < target:
            cands = [u for u in free if not g.has_edge(node, u)]
            u = min(cands, key=lambda u: dist(node, u))
            g.add_edge(node, u)

    # Reconnect components through free nodes, nearest pair first.
    rng = random.Random(SEED)
    while not nx.is_connected(g):
        comps = sorted(nx.connected_components(g), key=len)
        small, rest = comps[0], set().union(*comps[1:])
        pairs = [(a, b) for a in small for b in rest if a in free and b in free]
        a, b = min(pairs, key=lambda ab: dist(*ab)) if pairs else (None, None)
        if a is None:
            raise SystemExit("cannot reconnect without touching designated nodes")
        g.add_edge(a, b)
    for v in free:
        if g.degree(v) == 0:
            g.add_edge(v, rng.choice([u for u in free if u != v]))

    for node, target in DESIGNATED.items():
        assert g.degree(node) == target, (node, g.degree(node))
    assert nx.is_connected(g)
    return g


def main():
    g = build()
    out = sys.stdout
    out.write(f"# default 20-node sensor network, version {VERSION}\n")
    out.write(f"# random geometric graph (seed {SEED}, radius {RADIUS}), post-edited so that\n")
    out.write("# nodes 16,5,4,2,8,9,7 have 1,2,3,4,5,6,7 neighbours\n")
    for a, b in sorted(tuple(sorted(e)) for e in g.edges):
        out.write(f"{a} {b}\n")


if __name__ == "__main__":
    main()
