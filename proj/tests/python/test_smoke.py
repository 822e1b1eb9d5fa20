import math

import pytest

import eduembed as ee


def test_tokenize_and_vocab():
    assert ee.tokenize("Dr. Smith's CS-101!") == ["dr", "smith", "s", "cs", "101"]
    vocab = ee.build_vocab(["a b a", "c"], hash_buckets=8)
    assert vocab.tokens == ["a", "b", "c"]
    assert vocab.total_size == 11
    assert 3 <= vocab.token_id("zzz") < 11


def test_encoder_outputs_unit_vectors(tmp_path):
    vocab = ee.build_vocab(["the instructor is dr smith"])
    enc = ee.init_encoder(vocab, 8, 6, seed=3)
    v = enc.encode("instructor smith")
    assert len(v) == 6
    assert math.isclose(sum(x * x for x in v), 1.0, rel_tol=1e-12)
    ee.save_checkpoint(tmp_path / "ckpt", enc)
    back = ee.load_checkpoint(tmp_path / "ckpt")
    assert back.fingerprint == enc.fingerprint
    assert back.vocab == vocab


def test_losses():
    a = [[1.0, 0.0], [0.0, 1.0]]
    loss, ga, gp = ee.mnrl_loss(a, a, scale=20.0)
    assert loss == pytest.approx(math.log1p(math.exp(-20.0)))
    assert len(ga) == 2 and len(gp[0]) == 2
    loss, _, _ = ee.cosine_mse_loss([[1.0, 0.0]], [[0.0, 2.0]], [1])
    assert loss == pytest.approx(1.0)
    with pytest.raises(ee.EduembedError):
        ee.mnrl_loss([[2.0, 0.0]], [[1.0, 0.0]])


def test_chunking_and_retrieval():
    words = " ".join(f"w{i}" for i in range(650))
    chunks = ee.chunk_document("d", words)
    assert [len(c["text"].split()) for c in chunks] == [300, 300, 50]
    vocab = ee.build_vocab(["instructor smith", "parking lot"])
    enc = ee.init_encoder(vocab, seed=1)
    hits = ee.retrieve(enc, [("a", "instructor smith"), ("b", "parking lot")], "instructor smith", k=1)
    assert hits[0]["doc_id"] == "a"
    assert hits[0]["rank"] == 1


def test_grading():
    assert ee.normalize_text("  Sorry, I DON'T know ") == "sorry i don t know"
    assert ee.grade_answer("It is Dr. Smith.", ["Dr. Smith"]) == "valid"
    assert ee.grade_answer("Sorry, I don't know", None) == "valid"
    assert ee.grade_answer("Dr. Jones", None) == "invalid"
    assert ee.extractive_answer("", "Who?") == "Sorry, I don't know"


def test_synthetic_and_cli(tmp_path):
    corpus = ee.generate_synthetic(seed=42, n_positive=64, n_negative=16)
    assert len(corpus["positives"]) == 64
    assert len(corpus["labeled"]) == 80
    assert corpus == ee.generate_synthetic(seed=42, n_positive=64, n_negative=16)
    rc, out, err = ee.run_cli(["gen-synthetic", "--seed", "1", "--out", str(tmp_path / "data")])
    assert rc == 0, err
    assert (tmp_path / "data" / "pairs.jsonl").exists()
    rc, _, _ = ee.run_cli(["no-such-command"])
    assert rc == 1
