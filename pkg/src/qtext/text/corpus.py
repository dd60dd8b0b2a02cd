"""Tokenization, dataset loaders and seeded train/test sampling."""

import re
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from ..errors import ArgumentError, DataLayoutError, ParseError

LAMBEQ_CLASSES = ("computing", "food")
IMDB_CLASSES = ("neg", "pos")

_PUNCT = str.maketrans("", "", string.punctuation)
_BREAK = re.compile(r"<br\s*/?>", re.IGNORECASE)
_LAMBEQ_LINE = re.compile(r"^([01])\s+(.*\S)\s*$")


def tokenize(text, mode="whitespace"):
    """Split ``text`` into tokens.

    ``whitespace`` splits on runs of whitespace.  ``english`` also deletes
    ASCII punctuation from every token and drops tokens left empty; case is
    preserved.
    """
    tokens = text.split()
    if mode == "whitespace":
        return tokens
    if mode == "english":
        return [t for t in (tok.translate(_PUNCT) for tok in tokens) if t]
    raise ArgumentError(f"unknown tokenizer mode {mode!r}")


@dataclass(frozen=True)
class Document:
    tokens: tuple
    label: int
    doc_id: str = ""

    @property
    def signed_label(self):
        return 1 if self.label == 1 else -1


@dataclass(frozen=True)
class LabeledDataset:
    documents: tuple
    class_names: tuple

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        if len(self.documents) < 2:
            raise ArgumentError("a dataset needs at least two documents")
        present = {d.label for d in self.documents}
        if present != {0, 1}:
            raise ArgumentError(f"both classes must be present, found labels {sorted(present)}")

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    @property
    def labels(self):
        return [d.label for d in self.documents]

    @property
    def signed_labels(self):
        return [d.signed_label for d in self.documents]


def signed(label):
    """Class index 0 -> -1, class index 1 -> +1."""
    return 1 if label == 1 else -1


def load_lambeq(path):
    """Read ``<0|1><whitespace><sentence>`` lines; 0 is computing, 1 is food."""
    path = Path(path)
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            m = _LAMBEQ_LINE.match(line.rstrip("\n"))
            if not m:
                raise ParseError(f"expected '<0|1> <sentence>', got {line.strip()!r}", path, lineno)
            tokens = tuple(tokenize(m.group(2), "whitespace"))
            docs.append(Document(tokens, int(m.group(1)), f"{path.name}:{lineno}"))
    if not docs:
        raise ParseError("no examples found", path)
    return LabeledDataset(docs, LAMBEQ_CLASSES)


def bundled_lambeq_dir():
    return Path(str(resources.files("qtext") / "data" / "lambeq"))


def load_lambeq_split(root=None):
    """The 70-sentence training and 30-sentence test files as ``(train, test)``."""
    root = Path(root) if root is not None else bundled_lambeq_dir()
    return load_lambeq(root / "mc_train_data.txt"), load_lambeq(root / "mc_test_data.txt")


def _review_tokens(text):
    return tuple(tokenize(_BREAK.sub(" ", text), "english"))


def load_imdb(root):
    """One document per ``root/{neg,pos}/*.txt`` file, files in lexicographic order.

    HTML line breaks are removed before english tokenization.
    """
    root = Path(root)
    docs = []
    for label, name in enumerate(IMDB_CLASSES):
        sub = root / name
        if not sub.is_dir():
            raise DataLayoutError(f"{root} has no {name}/ subdirectory")
        files = sorted(sub.glob("*.txt"))
        if not files:
            raise DataLayoutError(f"{sub} contains no .txt files")
        for f in files:
            tokens = _review_tokens(f.read_text(encoding="utf-8"))
            if not tokens:
                raise ParseError("review has no tokens after preprocessing", f)
            docs.append(Document(tokens, label, f"{name}/{f.name}"))
    return LabeledDataset(docs, IMDB_CLASSES)


def _pick_groups(docs_by_class, group_key, need, rng):
    # Greedy: largest groups first (seeded tie order) until every class quota is met.
    groups = {}
    for label, idxs in docs_by_class.items():
        for i, doc_id in idxs:
            g = group_key.get(doc_id, ("__solo__", doc_id))
            groups.setdefault(g, {0: [], 1: []})[label].append((i, doc_id))
    keys = list(groups)
    order = rng.permutation(len(keys))
    keys = [keys[k] for k in order]
    keys.sort(key=lambda g: -(len(groups[g][0]) + len(groups[g][1])))
    chosen = {0: [], 1: []}
    for g in keys:
        if all(len(chosen[c]) >= need for c in (0, 1)):
            break
        for c in (0, 1):
            chosen[c].extend(groups[g][c])
    return chosen


def sample_subset(ds, n_train, n_test, seed, group_key=None):
    """Balanced, disjoint, seed-deterministic ``(train, test)`` split.

    Both sizes must be even so each class contributes exactly half.  With
    ``group_key`` (doc id -> group), documents come from the fewest groups
    that can fill both splits, taken greedily by size.
    """
    if n_train < 2 or n_test < 1:
        raise ArgumentError("need n_train >= 2 and n_test >= 1")
    if n_train % 2 or n_test % 2:
        raise ArgumentError("n_train and n_test must be even for an exactly balanced split")
    if n_train + n_test > len(ds):
        raise ArgumentError(f"requested {n_train + n_test} documents from a dataset of {len(ds)}")
    rng = np.random.default_rng(seed)
    need = (n_train + n_test) // 2
    by_class = {c: [(i, d.doc_id) for i, d in enumerate(ds.documents) if d.label == c] for c in (0, 1)}
    for c in (0, 1):
        if len(by_class[c]) < need:
            raise ArgumentError(
                f"class {ds.class_names[c]!r} has {len(by_class[c])} documents, {need} needed"
            )
    if group_key is not None:
        by_class = _pick_groups(by_class, group_key, need, rng)
    train, test = [], []
    for c in (0, 1):
        idxs = np.array(sorted(i for i, _ in by_class[c]))
        picked = rng.permutation(idxs)[:need]
        train.extend(picked[: n_train // 2])
        test.extend(picked[n_train // 2 :])
    docs = ds.documents
    return (
        LabeledDataset([docs[i] for i in sorted(train)], ds.class_names),
        LabeledDataset([docs[i] for i in sorted(test)], ds.class_names),
    )
