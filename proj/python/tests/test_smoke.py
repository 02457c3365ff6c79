import json
import os
from pathlib import Path

import pytest

import haplodrift

DATA = Path(os.environ.get("HAPLODRIFT_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_equilibrium_is_a_distribution():
    r = haplodrift.equilibrium(growth=0.02, mu=0.04)
    assert len(r["p_h"]) == 512
    assert sum(r["p_h"]) == pytest.approx(1.0, abs=1e-9)
    assert r["mean"] > 1.0


def test_simulate_is_deterministic():
    a = haplodrift.simulate(size=2000, gens=20, seed=3)
    b = haplodrift.simulate(size=2000, gens=20, seed=3)
    assert a == b
    assert sum(k * n for k, n in enumerate(a["cluster_counts"], start=1)) == 2000


def test_kit_and_match_probability():
    kit = haplodrift.load_kit(str(DATA / "kits" / "yfiler.json"))
    assert len(kit) == 16
    assert 0.03 < haplodrift.aggregate_mutation_rate(kit) < 0.06
    h = (DATA / "demo" / "A.csv").read_text().splitlines()[1]
    assert haplodrift.normalize_haplotype(h, kit) == h
    r = haplodrift.match_probability(str(DATA / "kits" / "yfiler.json"), str(DATA / "demo" / "db.csv"), h)
    assert 0.0 < r["probability"] < 1.0


def test_errors_raise():
    kit = haplodrift.load_kit(str(DATA / "kits" / "yfiler.json"))
    with pytest.raises(haplodrift.HaplodriftError):
        haplodrift.normalize_haplotype("1,2", kit)
    with pytest.raises(ValueError):
        haplodrift.ks_uniform_pvalue([])


def test_run_cli_equilibrium():
    code, out, err = haplodrift.run_cli(["equilibrium", "--mu", "0.05", "--truncation", "64"])
    assert code == 0, err
    assert out.startswith("# config: ")
    config = json.loads(out.splitlines()[0][len("# config: "):])
    assert config["truncation"] == 64
    code, _, err = haplodrift.run_cli(["equilibrium", "--nope"])
    assert code == 2
    assert json.loads(err)["error"] == "usage_error"
