import json
import math

import pytest

import lobtree

QUARTERS = {"type": "discrete", "atoms": [[-2, "3/4"], [1, "1/4"]]}
THIRDS = {"type": "discrete", "atoms": [[-1, "2/3"], [1, "1/3"]]}


def test_version():
    assert lobtree.__version__ == "0.1.0"


def test_classify_regimes():
    assert lobtree.classify(0.75, QUARTERS)["regime"] == "DivergesUp"
    assert lobtree.classify(0.55, QUARTERS)["regime"] == "DivergesDown"
    assert lobtree.classify(0.4, QUARTERS)["regime"] == "Recurrent"


def test_infimum_closed_form():
    r = lobtree.infimum_mgf(THIRDS)
    assert r["a"] == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-9)
    assert r["theta_star"] == pytest.approx(math.log(2) / 2, abs=1e-9)


def test_simulate_deterministic_chain():
    t = lobtree.simulate(1.0, {"type": "discrete", "atoms": [[1, "1"]]}, 3, 1)
    assert t["prices"] == [0, 1, 2, 3]
    assert t["tau"] is None


def test_coupled_run_matches():
    r = lobtree.coupled_run(0.7, THIRDS, 2000, 5)
    assert r["matched"]
    assert r["kappas"] == r["taus"]


def test_survival_and_drift():
    rows = lobtree.survival_estimate(0.75, QUARTERS, [0, 8], 200, 3)
    assert rows[0]["q"] == 1.0
    assert rows[1]["q"] <= rows[0]["q"]
    d = lobtree.drift_estimate(0.75, QUARTERS, 5000, 8, 3, threads=2)
    assert d["slope"] > 0


def test_execute_and_errors():
    cfg = {"command": "classify", "p": 0.75, "seed": 1, "dist": QUARTERS}
    assert json.loads(lobtree.execute(json.dumps(cfg)))["regime"] == "DivergesUp"
    cfg["p"] = 1.0
    with pytest.raises(ValueError):
        lobtree.execute(json.dumps(cfg))
    with pytest.raises(ValueError):
        lobtree.classify(0.7, {"type": "discrete", "atoms": [[-1, 0.5], [1, 0.49]]})
