import threading

import pytest

import commlab


def read(path):
    return path.read_text()


def test_run_script_is_deterministic_per_seed():
    src = "w = noise(50, 0.3);\nplot(w);"
    a = commlab.run_script(src, seed=11)
    b = commlab.run_script(src, seed=11)
    c = commlab.run_script(src, seed=12)
    assert a["status"] == "ok"
    assert a["figures"] == b["figures"]
    assert a["figures"] != c["figures"]


def test_run_script_errors_carry_position():
    r = commlab.run_script("x = 1;\ny = undefined_thing + 1;")
    assert r["status"] == "script-error"
    assert r["error"]["line"] == 2


def test_unknown_profile():
    with pytest.raises(ValueError):
        commlab.run_script("x = 1;", profile="nope")


def test_task1_starter_runs(course_dir):
    r = commlab.run_task(course_dir / "lab1/task1.json", read(course_dir / "lab1/task1.lab"), seed=3)
    assert r["status"] == "ok"
    assert len(r["figures"]) == 2
    labels = [c["label"] for f in r["figures"] for c in f["curves"]]
    assert labels == ["tx_bs", "tx_wave", "rx_wave", "rx_bs"]
    assert "Transmitted message: Finished!" in r["printed"]


def test_check_task2_starter_and_reference(course_dir):
    task = course_dir / "lab1/task2.json"
    bad = commlab.check_task(task, read(course_dir / "lab1/task2.starter.lab"), seed=1)
    good = commlab.check_task(task, read(course_dir / "lab1/task2.reference.lab"), seed=1)
    assert bad["overall"] == "fail"
    assert any("length 8 but should have length 72" in c["message"] for c in bad["checks"])
    assert good["overall"] == "pass"


def test_check_reversed_bits_gets_the_specific_message(course_dir):
    task = course_dir / "lab1/task2.json"
    r = commlab.check_task(task, read(course_dir / "lab1/task2.reversed.lab"), seed=1)
    msgs = [c["message"] for c in r["checks"] if c["verdict"] == "fail"]
    assert any("reverse order" in m for m in msgs)


def test_manifest_error_is_raised(tmp_path):
    (tmp_path / "t.json").write_text('{"title": "x"}')
    with pytest.raises(commlab.ManifestError):
        commlab.check_task(tmp_path / "t.json", "x = 1;")


def test_validate_shipped_course(course_dir):
    r = commlab.validate_course(course_dir)
    assert r["valid"], [t for t in r["tasks"] if not t["valid"]]
    assert len(r["tasks"]) >= 9


def test_service_flow(course_dir, tmp_path):
    svc = commlab.Service(course_dir, data_dir=tmp_path, admin_token="t")
    status, view = svc.task("lab1", "task2", "py")
    assert status == 200 and "reference" not in view
    status, res = svc.check("py", "lab1/task2", read(course_dir / "lab1/task2.reference.lab"))
    assert status == 200 and res["overall"] == "pass" and res["completed"]
    assert svc.quiz("lab5-threshold", "py", "0.495")[1]["correct"]
    assert svc.quiz("lab5-hist", "py", "gaussian")[1]["correct"]
    assert svc.run("py", "lab1/task1", "x" * (64 * 1024 + 1))[0] == 413
    assert svc.task("lab1", "nope")[0] == 404
    assert svc.exam("py", 0.5, "wrong")[0] == 403
    status, prog = svc.progress("py")
    assert status == 200
    assert prog["quiz_fraction"] == pytest.approx(2 / 6)
    assert prog["cumulative"] == pytest.approx(0.2 * 2 / 6 + 0.3 / 13)
    assert (tmp_path / "records.jsonl").exists()

    again = commlab.Service(course_dir, data_dir=tmp_path)
    assert again.progress("py") == (200, prog)


def test_service_threads_release_the_gil(course_dir):
    svc = commlab.Service(course_dir)
    src = read(course_dir / "lab1/task2.reference.lab")
    out = {}

    def work(i):
        out[i] = svc.check(f"t{i}", "lab1/task2", src)[1]["overall"]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert set(out.values()) == {"pass"}
