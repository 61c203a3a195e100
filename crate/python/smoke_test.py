"""Smoke test for the `rsg` extension module.

Build and install it first, e.g. `maturin develop -m crates/rsg-py/Cargo.toml`
or `pip install --no-build-isolation ./crates/rsg-py`, then run this file.
"""

import math
import sys

import rsg


def check(cond, msg):
    if not cond:
        print(f"FAIL: {msg}")
        sys.exit(1)
    print(f"ok: {msg}")


def main():
    pts = rsg.sample_unit_hypercube(2000, 3, seed=1)
    r = rsg.radius_fmt_star(2000, 3, 1.0)
    m, c = rsg.lookup_params(2000, 3)
    pairs, stats = rsg.rsg_all_pairs(pts, r, m, c, seed=7)
    truth = rsg.brute_force_all_pairs(pts, r)
    check(set(pairs) <= set(truth), "rsg pairs are a subset of the exact pairs")
    check(rsg.recall(pairs, truth) >= 0.95, f"recall {rsg.recall(pairs, truth):.4f} with table params m={m} c~={c}")
    check(stats["grids"] == m, "one grid per round")
    check(sorted(rsg.all_pairs(pts, r, "static-grid")) == sorted(truth), "static grid is exact")

    e = math.e
    check(abs(rsg.radius_prm_star(e, 1, 2.0) - 4 / e) < 1e-12, "PRM* radius hand value")

    sc = rsg.Scenario.builtin("z-tunnel", 3)
    check(abs(sc.world.free_volume() - 0.81) < 1e-12, "z-tunnel free volume")
    check(rsg.Scenario.from_toml(sc.to_toml()).to_toml() == sc.to_toml(), "scenario TOML round trip")

    res = rsg.fmt_star(sc.world, sc.start, sc.goal, 1000, goal_radius=0.05, seed=3)
    check(res.success and res.path[0] == sc.start, f"FMT* solves z-tunnel, cost {res.cost:.4f}")
    lazy = rsg.lazyb_prm_star(sc.world, sc.start, sc.goal, 400, goal_radius=0.05, seed=2)
    eager = rsg.prm_star(sc.world, sc.start, sc.goal, 400, goal_radius=0.05, seed=2)
    check(abs(lazy.cost - eager.cost) < 1e-9, "lazy and eager PRM* agree")
    check(lazy.cd_calls < eager.cd_calls, "lazy PRM* checks fewer edges")
    brrt = rsg.batched_rrt_star(sc.world, sc.start, sc.goal, 1000, goal_radius=0.05, seed=4)
    check(brrt.vertices >= 2, f"batched RRT* ran ({brrt})")

    try:
        rsg.World(2, [([0.5, 0.5], [0.2, 0.9])])
    except ValueError:
        check(True, "inverted box rejected")
    else:
        check(False, "inverted box rejected")
    print("smoke test passed")


if __name__ == "__main__":
    main()
