"""Bag-of-words topic classifier with a one-qubit-per-topic circuit variant.

Each word carries a score per topic, ``count(word in topic) / count(word)``.
A document's topic score is the sum over its tokens.  The circuit variant
rotates one accumulator qubit per topic by ``angle_scale * score`` for every
known token; because RY angles add and ``sin^2(t/2)`` is increasing on
``[0, pi]``, the most likely ``|1>`` qubit names the same topic as the
classical sum as long as every accumulated angle stays within ``pi``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .. import circuit as qc
from ..errors import ArgumentError, DegenerateInputError

CLASSICAL = "classical"
CIRCUIT = "circuit"
TIE_ATOL = 1e-12


@dataclass(frozen=True)
class QBowModel:
    scores: dict  # word -> per-topic score array
    angle_scale: float
    topics: tuple

    def score(self, word, topic):
        t = self.topics.index(topic) if isinstance(topic, str) else topic
        return float(self.scores[word][t]) if word in self.scores else 0.0

    def topic_sums(self, tokens):
        known = [self.scores[t] for t in tokens if t in self.scores]
        if not known:
            raise DegenerateInputError("document shares no words with the model vocabulary")
        return np.sum(known, axis=0)


def qbow_train(ds):
    topics = tuple(ds.class_names)
    counts = {}
    for doc in ds.documents:
        for tok in doc.tokens:
            counts.setdefault(tok, np.zeros(len(topics)))[doc.label] += 1
    if not counts:
        raise ArgumentError("training data has an empty vocabulary")
    scores = {w: c / c.sum() for w, c in counts.items()}
    peak = 0.0
    for doc in ds.documents:
        peak = max(peak, float(np.max(np.sum([scores[t] for t in doc.tokens], axis=0))))
    return QBowModel(scores, math.pi / peak, topics)


def _first_max(values, atol=0.0):
    best = 0
    for k in range(1, len(values)):
        if values[k] > values[best] + atol:
            best = k
    return best


def topic_circuit(model, tokens, scale):
    gates = []
    for tok in tokens:
        if tok in model.scores:
            for t, s in enumerate(model.scores[tok]):
                gates.append(qc.ry(t, scale * s))
    return qc.Circuit(len(model.topics), tuple(gates))


def one_probabilities(state):
    """Marginal probability of reading 1 on each qubit."""
    probs = state.probabilities()
    idx = np.arange(probs.shape[0])
    return np.array([probs[(idx >> q) & 1 == 1].sum() for q in range(state.n_qubits)])


def qbow_classify(model, doc, mode=CLASSICAL):
    """Topic name for ``doc``; ties go to the first topic in declared order."""
    tokens = getattr(doc, "tokens", doc)
    sums = model.topic_sums(tokens)
    if mode == CLASSICAL:
        return model.topics[_first_max(sums)]
    if mode != CIRCUIT:
        raise ArgumentError(f"unknown mode {mode!r}")
    # Unseen documents may exceed the training maximum; shrink to stay within pi.
    scale = min(model.angle_scale, math.pi / float(sums.max()))
    state = qc.run_circuit(qc.zero_state(len(model.topics)), topic_circuit(model, tokens, scale))
    return model.topics[_first_max(one_probabilities(state), TIE_ATOL)]
