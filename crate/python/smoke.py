"""Smoke test for the elg extension module: build it with
`pip install --no-build-isolation -e crates/py` and run this file."""

import json

import elg


def main():
    ds = elg.DataSet("exc", n=4)
    assert (ds.dim_e, ds.dim_n) == (10, 5), ds
    assert ds.embed_scale == ds.calibrate()
    assert json.loads(ds.check_admissible())["passed"]

    rep = json.loads(elg.verify_algebra(4))
    assert rep["dimension"] == elg.algebra_dim(4) == 25

    v = elg.Subspace.standard_colagrangian(ds)
    assert v.codim == 4 and v.is_colagrangian() and not v.is_lagrangian()
    t = elg.Subspace(ds, [[("1" if i == j else "0") for j in range(10)] for i in range(4)])
    assert t.is_lagrangian()
    assert json.loads(t.normalize_lagrangian())["label"] == "dim_n"

    k = elg.LieAlgebra.heisenberg(1)
    closed = json.dumps({"dim": 4, "deg": 1, "terms": [[[1], "1"]]})
    open_ = json.dumps({"dim": 4, "deg": 1, "terms": [[[3], "1"]]})
    assert k.twist_integrable(f1=closed)
    assert not k.twist_integrable(f1=open_)
    good = elg.Elgebra.from_lie_twisted(k, f1=closed)
    bad = elg.Elgebra.from_lie_twisted(k, f1=open_)
    assert json.loads(good.verify())["leibniz"]["passed"]
    assert not json.loads(bad.verify())["leibniz"]["passed"]
    assert json.loads(good.check_parallelisation(v))["passed"]
    again = elg.Elgebra.from_json(good.to_json())
    e1 = ["1"] + ["0"] * 9
    s2 = ["0"] * 4 + ["1"] + ["0"] * 5
    assert again.bracket(e1, s2) == good.bracket(e1, s2)

    sl = elg.DataSet("slwedge2", n=4)
    so5 = elg.Elgebra.from_lie(sl, elg.LieAlgebra.so(5))
    assert json.loads(so5.verify())["leibniz"]["passed"]
    assert so5.rank_d() == 0

    results = elg.run_suite(quick=True, seed=0)
    assert len(results) == 9 and all(p for _, _, p in results), results
    print("smoke ok:", ", ".join(f"{i}:{'pass' if p else 'FAIL'}" for i, _, p in results))


if __name__ == "__main__":
    main()
