import pytest

from epdm.cli import EXIT_CONFIG, EXIT_ENGINE, EXIT_OK, EXIT_VALIDATION, main
from epdm.trajectory import read_trajectory


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_simulate_colliding_constant(tmp_path):
    cfg = write(tmp_path, "c.cfg", "model = colliding\nN = 10\nk = 0.5\nn0 = 50\nseed = 1\n"
                                   "max_reactions = 5000\nsample_interval = 0.005\n")
    out = tmp_path / "t.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == EXIT_OK
    with open(out) as fh:
        snaps = read_trajectory(fh)
    assert len(snaps) > 3
    assert all(counts == snaps[0][1] for _, counts in snaps)
    assert [t for t, _ in snaps] == sorted(t for t, _ in snaps)
    meta = (tmp_path / "t.meta").read_text()
    assert "seed = 1" in meta and "reactions = 5000" in meta and "final_propensity" in meta


def test_simulate_zero_propensity(tmp_path):
    cfg = write(tmp_path, "z.cfg", "model = birth_death_dimer\nb = 0\nd = 0\nA0 = 3\n"
                                   "max_sim_time = 10\nsample_interval = 1\n")
    out = tmp_path / "z.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == EXIT_OK
    assert out.read_text() == "time,specie,count\n0.0,A,3\n"


def test_simulate_time_grid(tmp_path):
    cfg = write(tmp_path, "g.cfg", "model = birth_death_dimer\nb = 1\nd = 0.1\nc = 0.05\nu = 0.2\n"
                                   "seed = 4\nmax_sim_time = 5\nsample_interval = 1\n")
    out = tmp_path / "g.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == EXIT_OK
    with open(out) as fh:
        times = [t for t, _ in read_trajectory(fh)]
    assert times == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]


def test_simulate_deterministic(tmp_path):
    cfg = write(tmp_path, "d.cfg", "model = colored\nN = 5\nOmega = 4\nseed = 9\n"
                                   "max_reactions = 300\nsample_interval = 0.05\n")
    outs = []
    for name in ("a.csv", "b.csv"):
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / name)]) == EXIT_OK
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    assert main(["simulate", "--config", cfg, "--seed", "10", "--out", str(tmp_path / "c.csv")]) == EXIT_OK
    assert (tmp_path / "c.csv").read_bytes() != outs[0]


def test_config_error_exit(tmp_path, capsys):
    cfg = write(tmp_path, "bad.cfg", "")
    assert main(["simulate", "--config", cfg]) == EXIT_CONFIG
    assert "no stop condition" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG


def test_engine_error_exit(tmp_path, capsys):
    # an initial token the rule set does not understand fails inside the engine
    cfg = write(tmp_path, "e.cfg", "model = colliding\nN = 2\ninitial = P9:1\nmax_reactions = 3\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "e.csv")]) == EXIT_CONFIG
    assert "not a colliding-particles specie" in capsys.readouterr().err


def test_structural_error_exit(tmp_path, monkeypatch, capsys):
    from epdm import engine as engine_module
    from epdm.errors import StructuralError

    def broken(self, record):
        raise StructuralError("corrupted propensities")

    monkeypatch.setattr(engine_module.Engine, "apply_reaction", broken)
    cfg = write(tmp_path, "s.cfg", "model = colliding\nN = 2\nmax_reactions = 3\n")
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "s.csv")]) == EXIT_ENGINE
    assert "corrupted" in capsys.readouterr().err


def test_bench_cli(tmp_path, capsys):
    cfg = write(tmp_path, "b.cfg", "model = colliding\nsizes = 4, 8\nengines = epdm, dm\n"
                                   "replicates = 2\nmax_reactions = 50\n")
    out = tmp_path / "b.csv"
    assert main(["bench", "--config", cfg, "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "engine,N,M,replicate,reactions,sec_per_reaction"
    assert len(lines) == 1 + 2 * 2 * 2 + 2 * 2
    meta = (tmp_path / "b.meta").read_text()
    assert "slope_epdm" in meta and "slope_dm" in meta


def test_validate_cli(tmp_path, capsys):
    cfg = write(tmp_path, "v.cfg", "model = birth_death_dimer\nb = 1\nd = 0.1\nc = 0.05\nu = 0.2\n"
                                   "A0 = 5\nmax_sim_time = 2\nreplicates = 500\ndraws = 2000\n")
    assert main(["validate", "--config", cfg]) == EXIT_OK
    assert "result = pass" in capsys.readouterr().out
    assert main(["validate", "--config", cfg, "--seed", "3", "--dm-seed", "3"]) == EXIT_CONFIG


def test_validate_refuses_unbounded(tmp_path, capsys):
    cfg = write(tmp_path, "u.cfg", "model = colored\nN = 100\nOmega = 1000\nmax_sim_time = 1\n")
    assert main(["validate", "--config", cfg]) == EXIT_CONFIG
    assert "too large" in capsys.readouterr().err


def test_validation_failure_exit(tmp_path, monkeypatch):
    from epdm import cli

    class Failing:
        passed = False

        def render(self):
            return "result = fail\n"

    monkeypatch.setattr(cli, "run_validate", lambda cfg, seed, dm_seed: Failing())
    cfg = write(tmp_path, "f.cfg", "model = birth_death_dimer\nb = 1\nd = 1\nmax_sim_time = 1\n")
    assert main(["validate", "--config", cfg]) == EXIT_VALIDATION
