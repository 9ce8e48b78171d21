import numpy as np

from varimax_phase import cli
from varimax_phase.linalg import read_matrix, write_matrix
from varimax_phase.metrics import signed_permutation_gap
from varimax_phase.theory import check_theory


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_writes_three_matrices(tmp_path, capsys):
    d = tmp_path / "d"
    code, _, _ = run(capsys, "gen", "--n", "100", "--k", "3", "--law", "three_point:2.0", "--seed", "7",
                     "--out", str(d))
    assert code == 0
    assert sorted(p.name for p in d.iterdir()) == ["r_star.mat", "z.mat", "z_hat.mat"]
    z, r, zh = (read_matrix(d / f) for f in ("z.mat", "r_star.mat", "z_hat.mat"))
    assert np.max(np.abs(z @ r - zh)) <= 1e-10


def test_dist_same_file(tmp_path, capsys):
    write_matrix(tmp_path / "a.mat", np.array([[0.6, -0.8], [0.8, 0.6]]))
    code, out, _ = run(capsys, "dist", str(tmp_path / "a.mat"), str(tmp_path / "a.mat"))
    assert code == 0
    assert out.splitlines()[0] == "dist=0"
    assert out.splitlines()[1] == "perm=0 1 signs=+1 +1"


def test_varimax_and_witness(tmp_path, capsys):
    d = tmp_path / "inst"
    run(capsys, "gen", "--n", "128", "--k", "8", "--law", "sparse_gaussian:0.75", "--seed", "3", "--out", str(d))
    code, out, _ = run(capsys, "varimax", str(d / "z_hat.mat"), "--restarts", "3", "--seed", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# rows=8 cols=8"
    assert lines[-1].startswith("objective=") and "restarts=3" in lines[-1]
    code2, out2, _ = run(capsys, "varimax", str(d / "z_hat.mat"), "--restarts", "3", "--seed", "1")
    assert out2 == out

    code, out, _ = run(capsys, "witness", str(d))
    assert code == 0 and len(out.splitlines()) == 1
    fields = dict(tok.split("=", 1) for tok in out.split())
    assert set(fields) == {"a", "d1", "d2", "v_adv", "v_true", "beats"}
    a = np.array([[float(x) for x in row.split(",")] for row in fields["a"].split(";")])
    assert a.shape == (8, 8) and np.allclose(a @ a.T, np.eye(8))
    assert fields["beats"] in ("true", "false")


def test_usage_errors(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text("n_list = [50]\nk_list = [2]\nlaws = [gaussian]\n")
    code, _, err = run(capsys, "sweep", "--config", str(cfg), "--out", str(tmp_path / "r"), "--seed")
    assert code == 2 and "usage" in err
    code, _, err = run(capsys, "sweep", "--config", str(cfg), "--out", str(tmp_path / "r"))
    assert code == 2 and "--seed" in err
    code, _, err = run(capsys, "dist", "a", "b", "--bogus")
    assert code == 2 and "usage" in err
    code, _, _ = run(capsys, "gen", "--n", "10", "--k", "2", "--law", "three_point:1.0", "--seed", "1",
                     "--out", str(tmp_path / "x"))
    assert code == 2
    code, _, _ = run(capsys)
    assert code == 2


def test_runtime_errors_exit_1(tmp_path, capsys):
    write_matrix(tmp_path / "bad.mat", np.ones((2, 2)))
    code, _, err = run(capsys, "dist", str(tmp_path / "bad.mat"), str(tmp_path / "bad.mat"))
    assert code == 1 and "error" in err
    code, _, _ = run(capsys, "dist", str(tmp_path / "missing.mat"), str(tmp_path / "missing.mat"))
    assert code == 1


def test_sweep_outputs_and_determinism(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text("n_list = [30, 90]\nk_list = [2, 4]\nlaws = [three_point:2.0]\ntrials = 3\n"
                   "restarts = 2\nrun_witness = true\n")
    outs = []
    for i, workers in enumerate(("1", "2")):
        out = tmp_path / f"r{i}"
        code, _, _ = run(capsys, "sweep", "--config", str(cfg), "--out", str(out), "--seed", "9",
                         "--workers", workers)
        assert code == 0
        outs.append({f: (out / f).read_bytes() for f in ("records.csv", "summary.csv", "phase.svg")})
    assert outs[0] == outs[1]


def test_check_theory_small(capsys):
    code, out, _ = run(capsys, "check-theory", "--samples", "1", "--k-max", "2", "--seed", "0")
    assert code == 0
    assert "1 Haar" in out
    code, _, _ = run(capsys, "check-theory", "--samples", "10", "--k-max", "9", "--seed", "0")
    assert code == 1


def test_check_theory_detects_corrupted_gap():
    def corrupted(a):
        gap, t = signed_permutation_gap(a)
        return gap + 0.5, t

    results = check_theory(20, 3, seed=1, gap_fn=corrupted, mc_draws=20, mc_n=500)
    assert not all(r.passed for r in results)
    assert all(r.passed for r in check_theory(20, 3, seed=1, mc_draws=20, mc_n=500))


def test_check_theory_exit_status_on_failure(monkeypatch, capsys):
    def corrupted(a):
        gap, t = signed_permutation_gap(a)
        return 1.0, t

    monkeypatch.setattr(cli, "check_theory",
                        lambda s, k, seed: check_theory(s, k, seed, gap_fn=corrupted, mc_draws=20, mc_n=500))
    code, out, _ = run(capsys, "check-theory", "--samples", "5", "--k-max", "2", "--seed", "0")
    assert code == 1 and "FAIL" in out
