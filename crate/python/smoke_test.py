"""Smoke test for the glauberk Python extension.

Build and install it first:

    pip install -e crates/py --no-build-isolation
    python python/smoke_test.py
"""

import json
import math
import random

import glauberk as gk


def check_graphs():
    sq = gk.PeriodicGraph.preset("cubic2")
    assert (sq.dim, sq.cell_size, sq.max_degree) == (2, 1, 4)
    assert sq.k_stable(3) == (True, "stable, witness local=0")
    hex_ = gk.PeriodicGraph.preset("hex")
    assert hex_.k_stable(1)[1] == "not stable: no even-degree vertex"
    gamma = gk.PeriodicGraph.gamma("cubic2", 3, 3)
    assert gamma.cell_size == 29
    # specs round-trip
    assert gk.PeriodicGraph.from_spec(gamma.to_spec()).to_spec() == gamma.to_spec()
    try:
        gk.PeriodicGraph.preset("nope")
    except gk.GlauberkError:
        pass
    else:
        raise AssertionError("unknown preset accepted")


def check_energy():
    w = gk.Window(gk.PeriodicGraph.preset("hex"), [(0, 4), (0, 4)])
    assert (w.num_vertices, w.num_edges) == (32, 48)
    rng = random.Random(1)
    for _ in range(200):
        j = [rng.choice((-1, 1)) for _ in range(w.num_edges)]
        s = [rng.choice((-1, 1)) for _ in range(w.num_vertices)]
        v = rng.randrange(w.num_vertices)
        flipped = list(s)
        flipped[v] = -flipped[v]
        assert w.delta_h(j, s, [v]) == w.energy(j, flipped) - w.energy(j, s)
    assert gk.rate(2, 0.0) == 0.0 and gk.rate(0, 0.0) == 0.5 and gk.rate(-2, 0.0) == 1.0
    ratio = gk.rate(4, 1.5) / gk.rate(-4, 1.5)
    assert abs(ratio - math.exp(-8 / 1.5)) < 1e-12


def check_simulation():
    hex_ = gk.PeriodicGraph.preset("hex")
    runs = gk.simulate(hex_, [(0, 16), (0, 16)], t_max=200.0, seed=7, replicas=3)
    assert len(runs) == 3 and len({r.seed for r in runs}) == 3
    for r in runs:
        assert sum(r.n_minus) == 0
        assert r.energy <= r.initial_energy
    verdict = gk.classify(runs)
    assert verdict["verdict"] == "F", verdict

    again = gk.simulate(hex_, [(0, 16), (0, 16)], t_max=200.0, seed=7, replicas=1)
    assert again[0].summary_csv() == runs[0].summary_csv()
    assert json.loads(runs[0].config_json())["seed"] == 7

    chain = gk.PeriodicGraph.preset("example-m")
    runs = gk.simulate(chain, [(0, 16)], t_max=4000.0, seed=55, replicas=10, couplings="figure")
    verdict = gk.classify(runs)
    assert verdict["verdict"] == "M", verdict

    logged = gk.simulate(gk.PeriodicGraph.preset("cubic2"), [(0, 6), (0, 6)], temperature="const:1",
                         t_max=5.0, verbosity="accepted")
    assert logged[0].num_events == logged[0].total_accepted
    assert len(logged[0].events_jsonl().splitlines()) == logged[0].num_events


def check_absence():
    w, j, region = gk.example_m_region()
    assert gk.absence(w, j, region) == (True, "1024")


if __name__ == "__main__":
    check_graphs()
    check_energy()
    check_simulation()
    check_absence()
    print("glauberk", gk.__version__, "smoke test passed")
