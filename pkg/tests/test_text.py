import math
import os
from collections import Counter

import numpy as np
import pytest

from qtext.errors import ArgumentError, DataLayoutError, DegenerateInputError, ParseError
from qtext.text import corpus
from qtext.text import embeddings as emb
from qtext.text import features, qbow
from qtext.text.corpus import Document, LabeledDataset


def dataset(rows, names=("a", "b")):
    return LabeledDataset([Document(tuple(t.split()), lab, f"d{i}") for i, (t, lab) in enumerate(rows)], names)


class TestTokenize:
    def test_whitespace(self):
        assert corpus.tokenize("man prepares meal .") == ["man", "prepares", "meal", "."]

    def test_english(self):
        assert corpus.tokenize("Great movie!!", "english") == ["Great", "movie"]

    def test_empty(self):
        assert corpus.tokenize("") == []
        assert corpus.tokenize("  ...  ", "english") == []

    def test_unknown_mode(self):
        with pytest.raises(ArgumentError):
            corpus.tokenize("x", "bpe")


class TestLambeq:
    def test_line_labels(self, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("1  man prepares meal .\n0  skillful woman debugs program .\n")
        ds = corpus.load_lambeq(p)
        assert [ds.class_names[d.label] for d in ds] == ["food", "computing"]
        assert ds.documents[0].tokens == ("man", "prepares", "meal", ".")
        assert ds.signed_labels == [1, -1]

    def test_bad_label_reports_line(self, tmp_path):
        p = tmp_path / "d.txt"
        p.write_text("1 man prepares meal .\n2 bad label\n")
        with pytest.raises(ParseError) as info:
            corpus.load_lambeq(p)
        assert info.value.line == 2

    def test_bundled_split(self):
        train, test = corpus.load_lambeq_split()
        assert (len(train), len(test)) == (70, 30)
        texts = {" ".join(d.tokens) for d in list(train) + list(test)}
        assert "man prepares meal ." in texts
        assert "skillful woman debugs program ." in texts

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            corpus.load_lambeq(tmp_path / "nope.txt")


def write_imdb(root, n_pos, n_neg):
    for name, n in (("pos", n_pos), ("neg", n_neg)):
        (root / name).mkdir(parents=True)
        for i in range(n):
            (root / name / f"{i:03d}.txt").write_text(f"Review {name} {i}.<br /><br />Really {name}!")


class TestImdb:
    def test_layout(self, tmp_path):
        write_imdb(tmp_path, 25, 25)
        ds = corpus.load_imdb(tmp_path)
        assert len(ds) == 50
        assert Counter(ds.labels) == {0: 25, 1: 25}
        assert ds.documents[0].tokens == ("Review", "neg", "0", "Really", "neg")
        assert [d.doc_id for d in ds][:2] == ["neg/000.txt", "neg/001.txt"]

    def test_empty_pos(self, tmp_path):
        write_imdb(tmp_path, 0, 3)
        with pytest.raises(DataLayoutError):
            corpus.load_imdb(tmp_path)

    def test_missing_directory(self, tmp_path):
        with pytest.raises(DataLayoutError):
            corpus.load_imdb(tmp_path)

    @pytest.mark.skipif(not os.environ.get("QTEXT_IMDB_FULL"), reason="set QTEXT_IMDB_FULL to a 50k-review aclImdb root")
    def test_full_corpus_mean_length(self):
        root = os.environ["QTEXT_IMDB_FULL"]
        lengths = [len(d.tokens) for split in ("train", "test") for d in corpus.load_imdb(os.path.join(root, split))]
        assert 228 <= np.mean(lengths) <= 229

    def test_exported_reviews(self, imdb_root):
        ds = corpus.load_imdb(imdb_root)
        assert Counter(ds.labels) == {0: 12500, 1: 12500}


class TestSampleSubset:
    @pytest.fixture
    def fifty(self):
        return dataset([(f"w{i} x", i % 2) for i in range(50)])

    def test_forty_ten(self, fifty):
        train, test = corpus.sample_subset(fifty, 40, 10, seed=3)
        assert (len(train), len(test)) == (40, 10)
        assert Counter(train.labels) == {0: 20, 1: 20}
        assert Counter(test.labels) == {0: 5, 1: 5}
        assert not {d.doc_id for d in train} & {d.doc_id for d in test}

    def test_seeded(self, fifty):
        assert corpus.sample_subset(fifty, 10, 4, 7) == corpus.sample_subset(fifty, 10, 4, 7)
        assert corpus.sample_subset(fifty, 10, 4, 7) != corpus.sample_subset(fifty, 10, 4, 8)

    def test_no_room_for_test(self, fifty):
        with pytest.raises(ArgumentError):
            corpus.sample_subset(fifty, 50, 2, 0)

    def test_class_shortage(self):
        ds = dataset([("a", 0)] * 3 + [("b", 1)] * 10)
        with pytest.raises(ArgumentError):
            corpus.sample_subset(ds, 6, 2, 0)

    def test_group_key_uses_fewest_groups(self, fifty):
        groups = {f"d{i}": f"movie{i % 10}" for i in range(50)}
        train, test = corpus.sample_subset(fifty, 8, 2, 1, group_key=groups)
        used = {groups[d.doc_id] for d in list(train) + list(test)}
        # Each movie holds 5 documents; ten documents need at least two movies.
        assert len(used) <= 4
        assert Counter(train.labels) == {0: 4, 1: 4}


def pure_python_ppmi(token_lists, vocab, window):
    counts = {}
    for toks in token_lists:
        for i, a in enumerate(toks):
            for j in range(max(0, i - window), min(len(toks), i + window + 1)):
                if j != i and a in vocab and toks[j] in vocab:
                    key = (vocab[a], vocab[toks[j]])
                    counts[key] = counts.get(key, 0) + 1
    V = len(vocab)
    total = sum(counts.values())
    row = [0.0] * V
    for (a, _), c in counts.items():
        row[a] += c
    M = np.zeros((V, V))
    for (a, b), c in counts.items():
        M[a, b] = max(0.0, math.log(c * total / (row[a] * row[b])))
    return M


def random_corpus(rng, n_docs, vocab_size, length):
    # Zipf-like word draws so the PPMI matrix has structure.
    p = 1.0 / np.arange(1, vocab_size + 1)
    p /= p.sum()
    return [[f"w{k}" for k in rng.choice(vocab_size, size=length, p=p)] for _ in range(n_docs)]


class TestEmbeddings:
    def test_two_word_symmetry(self):
        table = emb.train_embeddings([["a", "b"]] * 5, dim=1, window=1)
        assert abs(table.vector("a")[0]) == pytest.approx(abs(table.vector("b")[0]), abs=1e-12)

    def test_lambeq_shape(self):
        train, test = corpus.load_lambeq_split()
        table = emb.train_embeddings(list(train) + list(test), 8)
        assert table.vectors.shape == (len(table), 8)
        assert np.all(np.isfinite(table.vectors))

    def test_ppmi_matches_pure_python(self, rng):
        docs = random_corpus(rng, 30, 40, 25)
        vocab = emb.build_vocabulary(docs)
        got = emb.ppmi(emb.cooccurrence(docs, vocab, 3)).toarray()
        np.testing.assert_allclose(got, pure_python_ppmi(docs, vocab, 3), atol=1e-12)

    @pytest.mark.parametrize("vocab_size,dim", [(60, 5), (1700, 8)])
    def test_rank_d_residual_is_optimal(self, rng, vocab_size, dim):
        docs = random_corpus(rng, 400 if vocab_size > 100 else 40, vocab_size, 60)
        table = emb.train_embeddings(docs, dim, window=2)
        if vocab_size > 100:
            assert len(table) > emb.DENSE_LIMIT
        M = pure_python_ppmi(docs, table.vocabulary, 2)
        sv = np.sort(np.abs(np.linalg.eigvalsh(M)))[::-1]
        optimum = math.sqrt(float(np.sum(sv[dim:] ** 2)))
        lam = table.eigenvalues
        recon = table.vectors @ np.diag(np.sign(lam)) @ table.vectors.T
        residual = np.linalg.norm(M - recon, "fro")
        assert abs(residual - optimum) <= 1e-6

    def test_deterministic(self):
        train, _ = corpus.load_lambeq_split()
        a = emb.train_embeddings(train, 6)
        b = emb.train_embeddings(train, 6)
        assert np.array_equal(a.vectors, b.vectors) and a.vocabulary == b.vocabulary

    def test_dim_too_large(self):
        with pytest.raises(ArgumentError):
            emb.train_embeddings([["a", "b"]], 3)

    def test_window_bound(self):
        counts = emb.cooccurrence([["a", "x", "b"]], {"a": 0, "b": 1}, 1).toarray()
        assert counts.sum() == 0
        counts = emb.cooccurrence([["a", "x", "b"]], {"a": 0, "b": 1}, 2).toarray()
        np.testing.assert_array_equal(counts, [[0, 1], [1, 0]])

    def test_no_cross_document_pairs(self):
        counts = emb.cooccurrence([["a"], ["b"]], {"a": 0, "b": 1}, 5)
        assert counts.nnz == 0

    def test_vocabulary_order_and_cap(self):
        vocab = emb.build_vocabulary([["b", "a", "b", "c", "a", "b"]], max_vocab=2)
        assert vocab == {"b": 0, "a": 1}
        assert emb.build_vocabulary([["x", "y", "y"]], min_count=2) == {"y": 0}

    def test_truncate(self):
        train, _ = corpus.load_lambeq_split()
        t = emb.train_embeddings(train, 6)
        np.testing.assert_array_equal(t.truncate(2).vectors, t.vectors[:, :2])
        with pytest.raises(ArgumentError):
            t.truncate(7)


class TestEmbeddingText:
    def test_two_lines(self, tmp_path):
        p = tmp_path / "v.txt"
        p.write_text("cat 1 2 3\ndog 4 5 6\n")
        t = emb.load_embeddings_text(p)
        assert (t.dim, len(t)) == (3, 2)
        assert list(t.vocabulary) == ["cat", "dog"]

    def test_header_line_skipped(self, tmp_path):
        p = tmp_path / "v.txt"
        p.write_text("2 2\ncat 1 2\ndog 3 4\n")
        assert len(emb.load_embeddings_text(p)) == 2

    @pytest.mark.parametrize("text", ["cat 1 nan\n", "cat 1 2\ndog 1\n", "cat 1 x\n", "cat\n", ""])
    def test_bad_files(self, tmp_path, text):
        p = tmp_path / "v.txt"
        p.write_text(text)
        with pytest.raises(ParseError):
            emb.load_embeddings_text(p)

    def test_roundtrip(self, tmp_path):
        train, _ = corpus.load_lambeq_split()
        t = emb.train_embeddings(train, 5)
        emb.save_embeddings_text(t, tmp_path / "v.txt")
        back = emb.load_embeddings_text(tmp_path / "v.txt")
        assert back.vocabulary == t.vocabulary
        assert np.abs(back.vectors - t.vectors).max() <= 1e-10


class TestSentenceVector:
    @pytest.fixture
    def table(self):
        return emb.EmbeddingTable({"a": 0, "b": 1, "c": 2}, np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]))

    def test_single_token(self, table):
        np.testing.assert_allclose(emb.sentence_vector(["a", "zzz"], table), [1, 0])

    def test_mean(self, table):
        s = 1 / math.sqrt(2)
        np.testing.assert_allclose(emb.sentence_vector(["a", "b"], table), [s, s], atol=1e-15)

    def test_cancellation(self, table):
        with pytest.raises(DegenerateInputError):
            emb.sentence_vector(["a", "c"], table)

    def test_all_unknown(self, table):
        with pytest.raises(DegenerateInputError):
            emb.sentence_vector(["x", "y"], table)


class TestQBow:
    @pytest.fixture
    def fig1(self):
        ds = dataset(
            [("football match", 0), ("football goal", 0), ("guitar song", 1), ("guitar chord", 1)],
            names=("sports", "music"),
        )
        return qbow.qbow_train(ds)

    def test_scores(self, fig1):
        assert fig1.score("football", "sports") == 1.0
        assert fig1.score("football", "music") == 0.0
        assert fig1.score("guitar", "music") == 1.0

    def test_balanced_word(self):
        m = qbow.qbow_train(dataset([("x y", 0), ("x z", 1)]))
        assert m.score("x", 0) == m.score("x", 1) == 0.5

    @pytest.mark.parametrize("mode", ["classical", "circuit"])
    def test_football_is_sports(self, fig1, mode):
        assert qbow.qbow_classify(fig1, ["football"], mode) == "sports"
        assert qbow.qbow_classify(fig1, ["guitar"], mode) == "music"

    def test_angle_scale_caps_training_sums(self, fig1):
        assert fig1.angle_scale == pytest.approx(math.pi / 2)

    def test_no_known_words(self, fig1):
        with pytest.raises(DegenerateInputError):
            qbow.qbow_classify(fig1, ["violin"])

    def test_tie_goes_to_first_topic(self, fig1):
        for mode in ("classical", "circuit"):
            assert qbow.qbow_classify(fig1, ["football", "guitar"], mode) == "sports"

    def test_modes_agree_on_random_documents(self, rng):
        train, test = corpus.load_lambeq_split()
        m = qbow.qbow_train(train)
        vocab = sorted(m.scores)
        for _ in range(200):
            doc = list(rng.choice(vocab, size=int(rng.integers(1, 12))))
            assert qbow.qbow_classify(m, doc, "classical") == qbow.qbow_classify(m, doc, "circuit")

    def test_unknown_mode(self, fig1):
        with pytest.raises(ArgumentError):
            qbow.qbow_classify(fig1, ["football"], "quantum")


class TestFeatureCsv:
    def test_roundtrip(self, tmp_path, rng):
        X = rng.normal(size=(4, 3))
        features.write_features_csv(tmp_path / "f.csv", X, [0, 1, 1, 0], ["train", "train", "test", "test"])
        Xb, y, splits = features.read_features_csv(tmp_path / "f.csv")
        assert np.array_equal(Xb, X)
        assert list(y) == [0, 1, 1, 0]
        assert splits == ["train", "train", "test", "test"]

    @pytest.mark.parametrize("text", ["", "a,b\n", "label,split,x0\n0,train\n", "label,split,x0\n3,train,1\n"])
    def test_malformed(self, tmp_path, text):
        (tmp_path / "f.csv").write_text(text)
        with pytest.raises(ParseError):
            features.read_features_csv(tmp_path / "f.csv")

    def test_featurize(self):
        train, _ = corpus.load_lambeq_split()
        t = emb.train_embeddings(train, 4)
        X, y = features.featurize(train, t)
        assert X.shape == (70, 4)
        np.testing.assert_allclose(np.linalg.norm(X, axis=1), 1.0, atol=1e-12)
        assert list(y) == train.labels


class TestExport:
    def test_limit_and_reuse(self, tmp_path):
        pytest.importorskip("movie_reviews")
        from qtext.text.sources import export_imdb

        assert export_imdb(tmp_path, 3) == {"neg": 3, "pos": 3}
        assert export_imdb(tmp_path, 3) == {"neg": 3, "pos": 3}
        assert len(corpus.load_imdb(tmp_path)) == 6

    def test_refuses_foreign_files(self, tmp_path):
        from qtext.text.sources import export_imdb

        write_imdb(tmp_path, 1, 1)
        with pytest.raises(DataLayoutError):
            export_imdb(tmp_path, 1)
