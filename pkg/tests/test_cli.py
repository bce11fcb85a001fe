import json

from cbfteleop.cli import main


def test_run_writes_logs_and_summary(tmp_path, capsys):
    out = tmp_path / "batch"
    rc = main(
        [
            "run",
            "--world", "default",
            "--condition", "N",
            "--pilot", "waypoint",
            "--trials", "2",
            "--seed", "3",
            "--out", str(out),
        ]
    )
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["trials"] == 2
    assert (out / "trial_000.jsonl").exists()
    assert (out / "summary.json").exists()


def test_run_rejects_bad_config(capsys):
    rc = main(["run", "--world", "default", "--condition", "PRF", "--mode", "override"])
    assert rc != 0


def test_run_rejects_missing_world(capsys):
    rc = main(["run", "--world", "/no/such/world.json"])
    assert rc != 0


def test_replay_and_metrics(tmp_path, capsys):
    out = tmp_path / "batch"
    main(["run", "--condition", "CBF", "--pilot", "waypoint", "--out", str(out)])
    capsys.readouterr()

    rc = main(["replay", "--log", str(out / "trial_000.jsonl"), "--csv", str(tmp_path / "t.csv")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["outcome"] == "success"
    assert report["metrics"]["D_total"] > 0
    csv = (tmp_path / "t.csv").read_text()
    assert csv.startswith("t,x,y,yaw,vx,vy,urx,ury,ux,uy,fx,fy,contact,condition")

    rc = main(["metrics", "--log-dir", str(out)])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("file,condition,seed,outcome")
    assert len(lines) == 2


def test_metrics_empty_dir(tmp_path):
    assert main(["metrics", "--log-dir", str(tmp_path)]) != 0
