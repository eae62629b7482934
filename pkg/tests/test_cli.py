import json

import pytest

from linefix.cli import main
from linefix.corpus import make_corpus
from linefix.datagen import read_dataset, write_dataset
from linefix.evaluator import EvaluatorSpec, evaluate
from linefix.model import ModelConfig, TrainConfig, train
from linefix.perturb import corrupt, rng_from


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    assert main(["make-corpus", "--out", str(root), "--count", "12",
                 "--seed", "5"]) == 0
    return root


@pytest.fixture(scope="module")
def dataset_path(tmp_path_factory, corpus_dir):
    out = tmp_path_factory.mktemp("data") / "toy.jsonl"
    code = main(["gen-data", "--corpus", str(corpus_dir), "--out", str(out),
                 "--per-program", "6", "--seed", "5"])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def ckpt_path(tmp_path_factory, dataset_path):
    out = tmp_path_factory.mktemp("ckpt") / "toy.ckpt"
    examples = read_dataset(dataset_path)
    cfg = ModelConfig(token_embed_dim=16, pos_embed_dim=8, state_dim=12,
                      max_decode_len=12)
    net, _ = train(examples[:40], examples[40:55], cfg,
                   TrainConfig(epochs=1, batch_size=10, seed=0))
    net.save(out)
    return out


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "linefix" in out and "format" in out


def test_tokenize(tmp_path, capsys):
    src = tmp_path / "p.c"
    src.write_text("char tmp, a, b;\n")
    assert main(["tokenize", "--input", str(src)]) == 0
    out = capsys.readouterr().out
    assert "char/typename" in out
    assert "tmp/identifier" in out
    assert ";/operator" in out


def test_tokenize_unreadable_exits_2():
    assert main(["tokenize", "--input", "/nonexistent/file.c"]) == 2


def test_graph_dump(tmp_path, capsys):
    src = tmp_path / "p.c"
    src.write_text("char a ;\nint n ;\nn = a . size ( ) ;\n")
    assert main(["graph", "--input", str(src)]) == 0
    captured = capsys.readouterr()
    payload = json.loads(captured.out)
    assert payload["nodes"]
    assert "cliques" in captured.err


def test_graph_compiling_input_needs_flag(tmp_path, capsys):
    src = tmp_path / "ok.c"
    src.write_text("int a ;\na = 1 ;\n")
    assert main(["graph", "--input", str(src)]) == 2
    assert main(["graph", "--input", str(src), "--no-feedback"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert {n[3] for n in payload["nodes"]} == {"a"}


def test_graph_evaluator_unavailable_exit_3(tmp_path):
    src = tmp_path / "p.c"
    src.write_text("a = ;\n")
    assert main(["graph", "--input", str(src),
                 "--evaluator-cmd", "no-such-compiler-zz {path}"]) == 3


def test_gen_data_deterministic(tmp_path, corpus_dir, dataset_path):
    out2 = tmp_path / "again.jsonl"
    assert main(["gen-data", "--corpus", str(corpus_dir), "--out", str(out2),
                 "--per-program", "6", "--seed", "5"]) == 0
    assert out2.read_bytes() == dataset_path.read_bytes()
    manifest = json.loads((str(dataset_path) + ".manifest.json")
                          and open(str(dataset_path) + ".manifest.json").read())
    assert manifest["counts"]["examples"] > 0


def test_gen_data_jobs_deterministic(tmp_path, corpus_dir, dataset_path):
    out2 = tmp_path / "jobs.jsonl"
    assert main(["gen-data", "--corpus", str(corpus_dir), "--out", str(out2),
                 "--per-program", "6", "--seed", "5", "--jobs", "2"]) == 0
    assert out2.read_bytes() == dataset_path.read_bytes()


def test_gen_data_all_failing(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    (empty / "broken.c").write_text("a = ;\n")
    assert main(["gen-data", "--corpus", str(empty), "--out",
                 str(tmp_path / "x.jsonl")]) == 2


def test_gen_data_examples_fail_to_compile(dataset_path):
    examples = read_dataset(dataset_path)
    spec = EvaluatorSpec(kind="minicheck")
    assert all(not evaluate(ex.broken, spec).compiles for ex in examples)


def test_stats(dataset_path, capsys):
    assert main(["stats", "--dataset", str(dataset_path)]) == 0
    out = capsys.readouterr().out
    assert "expected" in out
    assert "total" in out


def test_train_and_eval_and_repair(tmp_path, dataset_path, ckpt_path, capsys):
    assert main(["eval", "--dataset", str(dataset_path), "--ckpt",
                 str(ckpt_path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report["single"]) == {"localize_acc", "repair_acc"}
    assert report["count"] > 0

    # repair with the oracle policy restores a corrupted program
    corpus = make_corpus(12, seed=5)
    gold = corpus[0]
    rng = rng_from(5, 0)
    while True:
        broken, edits = corrupt(gold, rng)
        if len(edits) == 1 and not evaluate(broken, EvaluatorSpec()).compiles:
            break
    src = tmp_path / "broken.c"
    src.write_text(broken.to_text() + "\n")
    gold_path = tmp_path / "gold.c"
    gold_path.write_text(gold.to_text() + "\n")
    assert main(["repair", "--input", str(src), "--oracle-gold",
                 str(gold_path)]) == 0
    out = capsys.readouterr().out
    assert "success=True attempts=1" in out

    ok = tmp_path / "fine.c"
    ok.write_text("int a ;\n")
    assert main(["repair", "--input", str(ok), "--ckpt", str(ckpt_path)]) == 0
    assert "attempts=0" in capsys.readouterr().out


def test_repair_failure_exit_1(tmp_path, capsys):
    src = tmp_path / "broken.c"
    src.write_text("a = ;\n")
    assert main(["repair", "--input", str(src), "--identity"]) == 1


def test_train_cli_and_init_mismatch(tmp_path, dataset_path, ckpt_path, capsys):
    subset = read_dataset(dataset_path)[:20]
    small = tmp_path / "small.jsonl"
    write_dataset(subset, small)
    out = tmp_path / "model.ckpt"
    code = main(["train", "--train", str(small), "--dev", str(small),
                 "--out", str(out), "--epochs", "1", "--batch-size", "10"])
    assert code == 0
    assert out.exists()
    assert (tmp_path / "model.ckpt.log.jsonl").exists()
    config_echo = json.loads((tmp_path / "model.ckpt.config.json").read_text())
    assert config_echo["train"]["epochs"] == 1
    capsys.readouterr()
    # resumed training reuses the checkpoint vocabulary
    code = main(["train", "--train", str(small), "--dev", str(small),
                 "--out", str(tmp_path / "ft.ckpt"), "--epochs", "1",
                 "--batch-size", "10", "--init", str(out)])
    assert code == 0


def test_search_sim_modes(tmp_path, corpus_dir, capsys):
    tasks = tmp_path / "tasks.jsonl"
    assert main(["make-tasks", "--corpus", str(corpus_dir), "--out", str(tasks),
                 "--count", "8", "--pool-size", "3", "--seed", "5",
                 "--drop-alternate"]) == 0
    capsys.readouterr()
    assert main(["search-sim", "--tasks", str(tasks), "--budget", "10",
                 "--mode", "plain"]) == 0
    plain = json.loads(capsys.readouterr().out)
    assert main(["search-sim", "--tasks", str(tasks), "--budget", "10",
                 "--mode", "repair"]) == 0
    repair = json.loads(capsys.readouterr().out)
    assert repair["success_rate"] >= plain["success_rate"]
    assert main(["search-sim", "--tasks", str(tasks), "--budget", "0",
                 "--mode", "plain"]) == 0
    zero = json.loads(capsys.readouterr().out)
    assert zero["success_rate"] == 0.0


def test_config_file_and_flag_precedence(tmp_path, corpus_dir, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 7}))
    out1 = tmp_path / "a.jsonl"
    out2 = tmp_path / "b.jsonl"
    assert main(["gen-data", "--corpus", str(corpus_dir), "--out", str(out1),
                 "--per-program", "3", "--config", str(cfg)]) == 0
    assert main(["gen-data", "--corpus", str(corpus_dir), "--out", str(out2),
                 "--per-program", "3", "--config", str(cfg), "--seed", "7"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    manifest = json.loads(open(str(out1) + ".manifest.json").read())
    assert manifest["seed"] == 7
