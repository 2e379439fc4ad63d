import math

import networkx as nx
import pytest

import oracles
from spinnet.errors import InputError, ResourceError
from spinnet.graphs import (
    Move,
    apply_move,
    asymptotic_count_ratio,
    build_graph,
    count_shortest_paths,
    diameter,
    diameter_bound,
    distance,
    export_edges,
    find_path,
)
from spinnet.trees import canonical_nonplane, parse_bracket


def tree(text):
    return parse_bracket(text)[0]


def test_rotation_graph_examples():
    g = build_graph(2, "rotation")
    assert len(g) == 3 and g.degrees() == {2} and g.num_edges == 3
    g = build_graph(3, "rotation")
    assert len(g) == 15 and g.degrees() == {4}


def test_twist_rotation_sizes():
    g = build_graph(2, "twist_rotation")
    assert len(g) == 12 and g.num_edges == 18 and g.degrees() == {3}
    # twists at distinct nodes commute, closing 4-cycles
    t = g.vertices[0]
    v01 = apply_move("twist_rotation", apply_move("twist_rotation", t, Move("twist", 0)), Move("twist", 1))
    v10 = apply_move("twist_rotation", apply_move("twist_rotation", t, Move("twist", 1)), Move("twist", 0))
    assert v01 == v10 and distance(g, t, v01) == 2
    g = build_graph(3, "twist_rotation")
    assert len(g) == 120 and g.is_connected()


def test_graphs_match_oracle_golden(golden):
    ref = golden("graphs.json")
    for kind, ns in (("rotation", range(2, 6)), ("twist_rotation", range(2, 5))):
        for n in ns:
            g = build_graph(n, kind)
            entry = ref[kind][str(n)]
            assert len(g) == entry["vertices"]
            assert g.num_edges == entry["edges"]
            assert sorted(g.degrees()) == entry["degrees"]
            assert diameter(g) == entry["diameter"]


def test_rotation_graph_isomorphic_to_oracle():
    for n in (2, 3, 4):
        g = build_graph(n, "rotation")
        ours = nx.Graph()
        for v in range(len(g)):
            for u in g.neighbors(v):
                ours.add_edge(oracles.clusters_of(g.vertices[v].root), oracles.clusters_of(g.vertices[u].root))
        ref = oracles.rotation_graph_oracle(n)
        assert {frozenset(e) for e in ours.edges()} == {frozenset(e) for e in ref.edges()}


def test_twist_rotation_graph_equals_oracle():
    for n in (2, 3):
        g = build_graph(n, "twist_rotation")
        ours = {frozenset((g.vertices[v].root, g.vertices[u].root)) for v in range(len(g)) for u in g.neighbors(v)}
        ref = {frozenset(e) for e in oracles.twist_rotation_graph_oracle(n).edges()}
        assert ours == ref


def test_vertex_counts_and_regularity():
    for n in range(2, 7):
        g = build_graph(n, "rotation")
        assert len(g) == math.prod(range(1, 2 * n, 2))
        assert g.degrees() == {2 * (n - 1)}
        assert g.is_connected() and g.is_undirected()
    for n in range(2, 5):
        g = build_graph(n, "twist_rotation")
        assert len(g) == math.factorial(2 * n) // math.factorial(n)
        assert g.is_connected() and g.is_undirected()


def test_twist_rotation_valence():
    # each plane tree has n twists and n - 1 rotations
    for n in range(2, 5):
        assert build_graph(n, "twist_rotation").degrees() == {2 * n - 1}


def test_no_self_loops_or_parallel_edges():
    for n, kind in [(3, "rotation"), (4, "rotation"), (3, "twist_rotation")]:
        g = build_graph(n, kind)
        for v in range(len(g)):
            nbrs = g.neighbors(v)
            assert v not in nbrs and len(nbrs) == len(set(nbrs))


def test_edge_annotations_replay():
    for n, kind in [(3, "rotation"), (4, "rotation"), (3, "twist_rotation")]:
        g = build_graph(n, kind)
        for v, edges in enumerate(g.adjacency):
            for u, move in edges:
                assert apply_move(kind, g.vertices[v], move) == g.vertices[u]


def test_build_graph_range():
    with pytest.raises(ResourceError):
        build_graph(9, "rotation")
    with pytest.raises(ResourceError):
        build_graph(1, "rotation")
    with pytest.raises(InputError):
        build_graph(3, "nope")
    assert len(build_graph(7, "rotation", max_n=7)) == 135135


def test_distance_examples(golden):
    g = build_graph(3, "rotation")
    t = tree("(((1,2),3),4)")
    assert distance(g, t, t) == 0
    v = g.vertex(t)
    u = g.neighbors(v)[0]
    assert distance(g, t, g.vertices[u]) == 1
    planes = {3: build_graph(3, "twist_rotation")}
    for entry in golden("graphs.json")["pairs"]:
        gg = g if entry["kind"] == "rotation" else planes[entry["n"]]
        assert distance(gg, entry["t1"], entry["t2"]) == entry["distance"]
        assert count_shortest_paths(gg, entry["t1"], entry["t2"]) == entry["shortest_paths"]


def test_distance_wrong_graph():
    g = build_graph(3, "rotation")
    with pytest.raises(InputError):
        distance(g, "((1,2),3)", "((1,2),3)")
    with pytest.raises(InputError):
        g.vertex("((1,2),3")


def test_twist_classes_share_a_vertex():
    g = build_graph(3, "rotation")
    assert g.vertex("(((1,2),3),4)") == g.vertex("(4,(3,(2,1)))")


def test_diameter_bounds(golden):
    ref = golden("graphs.json")["rotation"]
    assert diameter(build_graph(2, "rotation")) == 1
    for n in (3, 4, 5):
        d = diameter(build_graph(n, "rotation"))
        assert d == ref[str(n)]["diameter"]
        assert d < diameter_bound(n)
    assert math.isclose(diameter_bound(3), 5.584962500721156)
    assert diameter_bound(4) == 9.0


def test_diameter_methods_agree():
    for n, kind in [(3, "rotation"), (4, "rotation"), (2, "twist_rotation"), (3, "twist_rotation")]:
        g = build_graph(n, kind)
        assert diameter(g, "orbits") == diameter(g, "all_pairs")


def test_find_path(golden):
    g = build_graph(3, "rotation")
    t = tree("(((1,2),3),4)")
    assert find_path(g, t, t) == []
    u = g.vertices[g.neighbors(g.vertex(t))[0]]
    (step,) = find_path(g, t, u)
    assert step[1] == u
    assert any(m == step[0] and w == g.vertex(u) for w, m in g.adjacency[g.vertex(t)])
    far = golden("graphs.json")["antipodal_n3"]
    path = find_path(g, far["t1"], far["t2"])
    assert len(path) == far["distance"]
    cur = canonical_nonplane(tree(far["t1"]))
    for move, after in path:
        cur = apply_move("rotation", cur, move)
        assert cur == after
    assert cur == canonical_nonplane(tree(far["t2"]))


def test_find_path_plane_replay():
    g = build_graph(3, "twist_rotation")
    a, b = tree("((1,2),(3,4))"), tree("((1,3),(2,4))")
    cur = a
    for move, after in find_path(g, a, b):
        cur = apply_move("twist_rotation", cur, move)
        assert cur == after
    assert cur == b


def test_find_path_deterministic():
    g1, g2 = build_graph(4, "rotation"), build_graph(4, "rotation")
    a, b = "((((1,2),3),4),5)", "((1,5),((2,4),3))"
    assert find_path(g1, a, b) == find_path(g2, a, b)


def test_asymptotic_ratios():
    r20 = asymptotic_count_ratio(20, "catalan")
    r40 = asymptotic_count_ratio(40, "catalan")
    assert abs(r20 - 1) < 0.01
    assert abs(r40 - 1) < abs(r20 - 1)
    # leading Stirling estimates without sqrt(2) prefactor: informational value only
    assert asymptotic_count_ratio(10, "double_factorial") > 0
    assert abs(asymptotic_count_ratio(200, "quadruple_factorial") - math.sqrt(2)) < 0.01
    with pytest.raises(InputError):
        asymptotic_count_ratio(2, "catalan")


def test_export_format():
    g = build_graph(2, "rotation")
    lines = export_edges(g).splitlines()
    assert lines[0] == "2 rotation 3 3"
    assert len(lines) == 4
