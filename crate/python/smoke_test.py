"""Smoke test for the Python bindings.

Build and install first:
    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/selfsim-*.whl
"""

import json
import math

import selfsim


def main():
    phi = (1 + math.sqrt(5)) / 2

    g = selfsim.SymbolicSystem.golden_mean(2.0)
    assert abs(g.spectral_radius() - phi) < 1e-12
    assert g.count_words(3) == "5"

    v = g.verify(pairs=2000, seed=1)
    assert v["passed"] and v["max_deviation"] == 0.0

    fit = g.capacity()
    assert abs(fit["slope"] - 2 * math.log(phi) / math.log(2)) < 0.02 * 1.3885

    ent = g.entropy(n_max=12)
    assert abs(ent["two_sided"] - 2 * math.log(phi)) < 1e-6

    parry = g.parry_compare(k=2)
    assert parry["max_gap"] < 1e-9

    cat = selfsim.ToralSystem.cat_map()
    assert abs(cat.lam - (3 + math.sqrt(5)) / 2) < 1e-12
    r = cat.verify(scale=0.01, pairs=1000)
    assert r["passed"] and r["max_deviation"] < 1e-9
    z = cat.bracket((0.1, 0.2), (0.11, 0.2))
    assert all(0.0 <= c < 1.0 for c in z)

    cfg = json.dumps({"system": "golden-mean", "lambda": 2, "command": "fundamental"})
    assert selfsim.parse_config(cfg)["seed"] is not None
    report = selfsim.run_experiment(cfg)
    assert report["passed"], report

    try:
        selfsim.parse_config(json.dumps({"system": "golden-mean", "lambda": 0.5, "command": "verify"}))
    except ValueError as e:
        assert "λ must exceed 1" in str(e)
    else:
        raise AssertionError("λ = 0.5 was accepted")

    assert abs(selfsim.ideal_factor(2 * math.log(2.5), 2) - 2.5) < 1e-12
    print("python smoke test passed")


if __name__ == "__main__":
    main()
