"""Boosted-tree training: loss math, split/leaf formulas, serialization."""

from __future__ import annotations

import datetime as dt
import json

import numpy as np
import pytest

from fednlp import classifier
from fednlp.classifier import (
    GbdtConfig,
    GbdtModel,
    evaluate,
    gradient_hessian,
    load,
    log_loss,
    predict_proba,
    save,
    serialize,
    softmax,
    train,
)
from fednlp.corpus import Document, DocCategory, RateDecision
from fednlp.errors import (
    ArtifactVersionError,
    EmptyCorpusError,
    EmptyDocumentError,
    InsufficientLabelsError,
)


def make_doc(body, doc_id, label, day=1):
    return Document(
        id=doc_id, title="t", author="a", category=DocCategory.SPEECH,
        date=dt.date(2020, 1, day), source_url="", body=body, label=label,
    )


def tiny_corpus():
    """Separable two-class corpus: 'up' marks raise, 'dn' marks lower."""
    docs = []
    for i in range(4):
        docs.append(make_doc("up up signal", f"u-{i}", RateDecision.RAISE, day=i + 1))
        docs.append(make_doc("dn dn signal", f"d-{i}", RateDecision.LOWER, day=i + 1))
    return docs


class TestLossMath:
    def test_softmax_rows_sum_to_one(self):
        rng = np.random.default_rng(0)
        p = softmax(rng.normal(size=(50, 3)) * 5)
        assert np.allclose(p.sum(axis=1), 1.0)
        assert (p > 0).all()

    def test_softmax_shift_invariant(self):
        s = np.array([[1.0, 2.0, 3.0]])
        assert np.allclose(softmax(s), softmax(s + 1000.0))

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        scores = rng.normal(size=(20, 3)) * 2
        y = rng.integers(0, 3, size=20)
        eps = 1e-5
        probs = softmax(scores)
        for c in range(3):
            g, _ = gradient_hessian(probs, y, c)
            bumped_up, bumped_dn = scores.copy(), scores.copy()
            bumped_up[:, c] += eps
            bumped_dn[:, c] -= eps
            for i in range(len(y)):
                lo = -np.log(softmax(bumped_dn[i : i + 1])[0, y[i]])
                hi = -np.log(softmax(bumped_up[i : i + 1])[0, y[i]])
                numeric = (hi - lo) / (2 * eps)
                assert numeric == pytest.approx(g[i], rel=1e-5, abs=1e-8)

    def test_hessian_matches_finite_differences(self):
        # The hessian is the derivative of the gradient; differencing the
        # validated analytic gradient keeps the check well inside float64
        # precision, where second differences of the loss itself bottom out
        # around 1e-7.
        rng = np.random.default_rng(2)
        scores = rng.normal(size=(20, 3))
        y = rng.integers(0, 3, size=20)
        eps = 1e-5
        for c in range(3):
            _, h = gradient_hessian(softmax(scores), y, c)
            up, dn = scores.copy(), scores.copy()
            up[:, c] += eps
            dn[:, c] -= eps
            g_up, _ = gradient_hessian(softmax(up), y, c)
            g_dn, _ = gradient_hessian(softmax(dn), y, c)
            numeric = (g_up - g_dn) / (2 * eps)
            for i in range(len(y)):
                assert numeric[i] == pytest.approx(h[i], rel=1e-5)

    def test_hessian_second_difference_of_loss(self):
        # Direct corroboration at the widest eps the curvature allows.
        rng = np.random.default_rng(3)
        scores = rng.normal(size=(10, 3))
        y = rng.integers(0, 3, size=10)
        eps = 5e-4
        probs = softmax(scores)
        for c in range(3):
            _, h = gradient_hessian(probs, y, c)
            for i in range(len(y)):
                def loss_at(delta, i=i, c=c):
                    s = scores[i : i + 1].copy()
                    s[0, c] += delta
                    return -np.log(softmax(s)[0, y[i]])

                numeric = (loss_at(eps) - 2 * loss_at(0.0) + loss_at(-eps)) / eps**2
                assert numeric == pytest.approx(h[i], rel=1e-4, abs=1e-6)

    def test_hessian_is_p_times_one_minus_p(self):
        probs = softmax(np.array([[0.3, -0.2, 1.4]]))
        _, h = gradient_hessian(probs, np.array([2]), 1)
        assert h[0] == pytest.approx(probs[0, 1] * (1 - probs[0, 1]))

    def test_log_loss_perfect_prediction(self):
        probs = np.array([[1.0, 0.0, 0.0]])
        assert log_loss(probs, np.array([0])) == pytest.approx(0.0, abs=1e-12)


class TestLeafClosedForm:
    def test_depth_one_leaves_match_minus_g_over_h(self):
        """Single round, depth 1, 8 samples: leaves must equal -G/(H+lambda)."""
        docs = tiny_corpus()
        lam = 1.0
        cfg = GbdtConfig(
            n_rounds=1, learning_rate=1.0, max_depth=1, min_leaf_samples=1,
            l2_leaf_reg=lam, feature_subsample=1.0, seed=0,
        )
        model = train(docs, cfg, tfidf_params={"min_df": 1})

        ordered = sorted(docs, key=lambda d: d.id)
        y = np.array([int(d.label) for d in ordered])
        base = np.array(model.base_scores)
        probs = softmax(np.tile(base, (len(ordered), 1)))

        from fednlp.corpus import tokenize_document
        from fednlp.features import transform

        vectors = [transform(model.tfidf, tokenize_document(d)) for d in ordered]

        for cls in range(3):
            tree = model.trees[0][cls]
            g, h = gradient_hessian(probs, y, cls)
            assert len(tree.feature) in (1, 3)  # pure leaf or one split
            for i, d in enumerate(ordered):
                node = 0
                while tree.feature[node] != -1:
                    x = dict(zip(vectors[i].indices, vectors[i].values)).get(
                        tree.feature[node], 0.0
                    )
                    node = tree.left[node] if x <= tree.threshold[node] else tree.right[node]
                # Gather every sample landing in this node and check its value.
                members = []
                for j, dj in enumerate(ordered):
                    nj = 0
                    while tree.feature[nj] != -1:
                        xj = dict(zip(vectors[j].indices, vectors[j].values)).get(
                            tree.feature[nj], 0.0
                        )
                        nj = tree.left[nj] if xj <= tree.threshold[nj] else tree.right[nj]
                    if nj == node:
                        members.append(j)
                expected = -g[members].sum() / (h[members].sum() + lam)
                assert tree.value[node] == pytest.approx(expected, abs=1e-12)

    def test_no_split_when_feature_constant(self):
        docs = [
            make_doc("same same", f"x-{i}", RateDecision.RAISE if i % 2 else RateDecision.LOWER)
            for i in range(6)
        ]
        cfg = GbdtConfig(n_rounds=1, max_depth=3, min_leaf_samples=1,
                         feature_subsample=1.0, seed=0)
        model = train(docs, cfg, tfidf_params={"min_df": 1})
        for cls in range(3):
            tree = model.trees[0][cls]
            assert tree.feature == (-1,)  # single root leaf

    def test_split_tie_prefers_lowest_feature_index(self):
        # Tokens "aa" and "bb" always co-occur, so both features carry the
        # identical split; index of "aa" (lexicographically first) must win.
        docs = []
        for i in range(4):
            docs.append(make_doc("aa bb", f"p-{i}", RateDecision.RAISE, day=i + 1))
            docs.append(make_doc("cc cc", f"n-{i}", RateDecision.LOWER, day=i + 1))
        cfg = GbdtConfig(n_rounds=1, max_depth=1, min_leaf_samples=1,
                         feature_subsample=1.0, seed=0)
        model = train(docs, cfg, tfidf_params={"min_df": 1})
        assert model.tfidf.vocabulary["aa"] == 0
        tree = model.trees[0][RateDecision.RAISE]
        assert tree.feature[0] == 0

    def test_min_leaf_samples_blocks_small_splits(self):
        docs = tiny_corpus()  # 4 per class
        cfg = GbdtConfig(n_rounds=1, max_depth=4, min_leaf_samples=5,
                         feature_subsample=1.0, seed=0)
        model = train(docs, cfg, tfidf_params={"min_df": 1})
        # No partition can give both sides >= 5 of 8 samples.
        for cls in range(3):
            assert model.trees[0][cls].feature == (-1,)


class TestTraining:
    def test_loss_non_increasing(self, small_model):
        losses = small_model.train_loss
        assert len(losses) == small_model.config.n_rounds + 1
        for a, b in zip(losses, losses[1:]):
            assert b <= a + 1e-12

    def test_separable_corpus_learned(self):
        docs = tiny_corpus()
        cfg = GbdtConfig(n_rounds=15, max_depth=2, min_leaf_samples=1,
                         feature_subsample=1.0, seed=0)
        model = train(docs, cfg, tfidf_params={"min_df": 1})
        up = predict_proba(model, make_doc("up up signal", "q1", None))
        dn = predict_proba(model, make_doc("dn dn signal", "q2", None))
        assert up.label is RateDecision.RAISE
        assert dn.label is RateDecision.LOWER

    def test_absent_class_never_dominates(self):
        docs = tiny_corpus()  # no MAINTAIN anywhere
        cfg = GbdtConfig(n_rounds=5, max_depth=2, min_leaf_samples=1,
                         feature_subsample=1.0, seed=0)
        model = train(docs, cfg, tfidf_params={"min_df": 1})
        pred = predict_proba(model, make_doc("signal", "q", None))
        assert pred.probs[RateDecision.MAINTAIN] < 1e-6

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpusError):
            train([], GbdtConfig())

    def test_unlabeled_document_rejected(self):
        docs = tiny_corpus()
        docs[0] = make_doc("up up", "u-0", None)
        with pytest.raises(InsufficientLabelsError):
            train(docs, GbdtConfig(n_rounds=1))

    def test_single_class_rejected(self):
        docs = [make_doc("up", f"u-{i}", RateDecision.RAISE) for i in range(4)]
        with pytest.raises(InsufficientLabelsError):
            train(docs, GbdtConfig(n_rounds=1))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GbdtConfig(n_rounds=0)
        with pytest.raises(ValueError):
            GbdtConfig(feature_subsample=0.0)
        with pytest.raises(ValueError):
            GbdtConfig(feature_subsample=1.5)
        with pytest.raises(ValueError):
            GbdtConfig(learning_rate=0.0)

    def test_deterministic_and_permutation_invariant(self):
        docs = tiny_corpus()
        cfg = GbdtConfig(n_rounds=3, max_depth=2, min_leaf_samples=1, seed=9)
        a = serialize(train(docs, cfg, tfidf_params={"min_df": 1}))
        b = serialize(train(list(reversed(docs)), cfg, tfidf_params={"min_df": 1}))
        c = serialize(train(docs, cfg, tfidf_params={"min_df": 1}))
        assert a == b == c

    def test_probabilities_sum_to_one(self, small_model, synth_corpus):
        docs, _ = synth_corpus
        for d in docs[:10]:
            pred = predict_proba(small_model, d)
            assert sum(pred.probs) == pytest.approx(1.0, abs=1e-9)
            assert int(pred.label) == int(np.argmax(pred.probs))

    def test_empty_document_rejected(self, small_model):
        with pytest.raises(EmptyDocumentError):
            predict_proba(small_model, make_doc("...", "e", None))


class TestEvaluate:
    def test_perfect_model_metrics(self):
        docs = tiny_corpus()
        cfg = GbdtConfig(n_rounds=15, max_depth=2, min_leaf_samples=1, seed=0)
        model = train(docs, cfg, tfidf_params={"min_df": 1})
        report = evaluate(model, docs)
        assert report.accuracy == 1.0
        assert report.weighted_f1 == pytest.approx(1.0)
        assert report.per_class["raise"].f1 == 1.0
        assert report.per_class["maintain"].support == 0
        assert report.per_class["maintain"].f1 == 0.0
        assert report.confusion[0][0] == 4
        assert report.confusion[2][2] == 4

    def test_confusion_row_sums_match_supports(self, small_model, synth_corpus):
        docs, _ = synth_corpus
        ordered = sorted(docs, key=lambda d: (d.date, d.id))
        report = evaluate(small_model, ordered[96:])
        for c, name in enumerate(("lower", "maintain", "raise")):
            assert sum(report.confusion[c]) == report.per_class[name].support
        total = sum(sum(row) for row in report.confusion)
        assert total == len(ordered[96:])
        diag = sum(report.confusion[i][i] for i in range(3))
        assert report.accuracy == pytest.approx(diag / total)

    def test_unlabeled_rejected(self, small_model):
        with pytest.raises(InsufficientLabelsError):
            evaluate(small_model, [make_doc("up", "x", None)])

    def test_empty_rejected(self, small_model):
        with pytest.raises(EmptyCorpusError):
            evaluate(small_model, [])


class TestSerialization:
    def test_round_trip_identical(self, small_model, synth_corpus, tmp_path):
        path = tmp_path / "model.bin"
        save(small_model, path)
        loaded = load(path)
        assert serialize(loaded) == serialize(small_model)
        docs, _ = synth_corpus
        for d in docs[:5]:
            assert predict_proba(loaded, d) == predict_proba(small_model, d)

    def test_save_is_byte_stable(self, small_model, tmp_path):
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        save(small_model, p1)
        save(small_model, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_version_mismatch(self, small_model, tmp_path):
        payload = json.loads(serialize(small_model))
        payload["format_version"] = 99
        path = tmp_path / "bad.bin"
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(ArtifactVersionError) as exc:
            load(path)
        assert "99" in str(exc.value)

    def test_missing_version_field(self, small_model, tmp_path):
        payload = json.loads(serialize(small_model))
        del payload["format_version"]
        path = tmp_path / "bad.bin"
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(ArtifactVersionError):
            load(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"\x00\x01not a model")
        with pytest.raises(ArtifactVersionError):
            load(path)

    def test_format_version_leads_serialization(self, small_model):
        blob = serialize(small_model)
        assert blob.startswith('{"format_version":')
