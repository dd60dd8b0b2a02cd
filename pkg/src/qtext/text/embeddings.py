"""Deterministic distributional word vectors and sentence averaging.

Word vectors come from a symmetric-window co-occurrence matrix reweighted by
positive pointwise mutual information (PPMI) and factorized by a truncated
symmetric eigendecomposition.  Coordinates are eigenvectors scaled by the
square root of the eigenvalue magnitudes, ordered by decreasing magnitude.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg

from ..errors import ArgumentError, DegenerateInputError, ParseError

# Vocabularies up to this size use a dense LAPACK eigensolver.
DENSE_LIMIT = 1500


@dataclass(frozen=True)
class EmbeddingTable:
    vocabulary: dict
    vectors: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=float)
        if vecs.ndim != 2 or vecs.shape[1] < 1:
            raise ArgumentError(f"vectors must be a |V| x d matrix with d >= 1, got shape {vecs.shape}")
        if vecs.shape[0] != len(self.vocabulary):
            raise ArgumentError(f"{len(self.vocabulary)} words but {vecs.shape[0]} vectors")
        if not np.all(np.isfinite(vecs)):
            raise ArgumentError("embedding table contains NaN or Inf")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return len(self.vocabulary)

    def __contains__(self, token):
        return token in self.vocabulary

    def vector(self, token):
        return self.vectors[self.vocabulary[token]]

    def truncate(self, dim):
        """Table restricted to the leading ``dim`` coordinates."""
        if not 1 <= dim <= self.dim:
            raise ArgumentError(f"cannot truncate a {self.dim}-d table to {dim}")
        eig = None if self.eigenvalues is None else self.eigenvalues[:dim]
        return EmbeddingTable(self.vocabulary, self.vectors[:, :dim].copy(), eig)


def _token_lists(corpus):
    docs = getattr(corpus, "documents", corpus)
    return [list(getattr(d, "tokens", d)) for d in docs]


def build_vocabulary(token_lists, max_vocab=None, min_count=1):
    """Token -> row index, most frequent first, ties broken lexicographically."""
    counts = {}
    for toks in token_lists:
        for t in toks:
            counts[t] = counts.get(t, 0) + 1
    words = sorted((w for w, c in counts.items() if c >= min_count), key=lambda w: (-counts[w], w))
    if max_vocab is not None:
        words = words[:max_vocab]
    return {w: i for i, w in enumerate(words)}


def cooccurrence(token_lists, vocabulary, window):
    """Symmetric counts of in-vocabulary pairs at distance ``1..window`` within a document.

    Out-of-vocabulary tokens keep their position, so they still count toward
    the distance between their neighbours.
    """
    if window < 1:
        raise ArgumentError(f"window must be >= 1, got {window}")
    V = len(vocabulary)
    pad = np.full(window, -1, dtype=np.int64)
    pieces = []
    for toks in token_lists:
        pieces.append(np.array([vocabulary.get(t, -1) for t in toks], dtype=np.int64))
        pieces.append(pad)
    ids = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)
    rows, cols = [], []
    for k in range(1, window + 1):
        a, b = ids[:-k], ids[k:]
        keep = (a >= 0) & (b >= 0)
        rows += [a[keep], b[keep]]
        cols += [b[keep], a[keep]]
    r = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    c = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    return sp.coo_matrix((np.ones(r.shape[0]), (r, c)), shape=(V, V)).tocsr()


def ppmi(counts):
    """``max(0, log(p(w, c) / (p(w) p(c))))`` on the nonzero entries of ``counts``."""
    counts = sp.csr_matrix(counts, dtype=float)
    total = counts.sum()
    if total == 0:
        return counts.copy()
    row = np.asarray(counts.sum(axis=1)).ravel()
    coo = counts.tocoo()
    pmi = np.log(coo.data * total / (row[coo.row] * row[coo.col]))
    keep = pmi > 0
    out = sp.coo_matrix((pmi[keep], (coo.row[keep], coo.col[keep])), shape=counts.shape)
    return out.tocsr()


def truncated_eigh(M, dim):
    """Top-``dim`` eigenpairs of symmetric ``M`` by eigenvalue magnitude.

    Ties in magnitude put the positive eigenvalue first.  Each eigenvector
    is signed so its largest-magnitude entry is positive.
    """
    n = M.shape[0]
    if n <= DENSE_LIMIT or dim >= n - 1:
        dense = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
        lam, U = scipy.linalg.eigh(dense)
    else:
        v0 = np.full(n, 1.0 / math.sqrt(n))
        lam, U = scipy.sparse.linalg.eigsh(sp.csr_matrix(M), k=dim, which="LM", v0=v0)
    order = np.lexsort((-lam, -np.abs(lam)))[:dim]
    lam, U = lam[order], U[:, order]
    pivot = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[pivot, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return lam, U * signs


def train_embeddings(corpus, dim, window=5, max_vocab=None, min_count=1):
    """PPMI + truncated eigendecomposition word vectors trained on ``corpus``."""
    token_lists = _token_lists(corpus)
    vocab = build_vocabulary(token_lists, max_vocab, min_count)
    if dim < 1 or dim > len(vocab):
        raise ArgumentError(f"dim must be in 1..{len(vocab)} (vocabulary size), got {dim}")
    M = ppmi(cooccurrence(token_lists, vocab, window))
    lam, U = truncated_eigh(M, dim)
    return EmbeddingTable(vocab, U * np.sqrt(np.abs(lam)), lam)


def load_embeddings_text(path):
    """Read ``token v1 ... vd`` lines; an optional leading ``<count> <dim>`` line is skipped."""
    vocab, rows = {}, []
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            token, values = parts[0], parts[1:]
            if not values:
                raise ParseError(f"token {token!r} has no coordinates", path, lineno)
            try:
                vec = [float(v) for v in values]
            except ValueError:
                raise ParseError("non-numeric coordinate", path, lineno) from None
            if not all(math.isfinite(v) for v in vec):
                raise ParseError("NaN or Inf coordinate", path, lineno)
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise ParseError(f"expected {dim} coordinates, got {len(vec)}", path, lineno)
            if token in vocab:
                raise ParseError(f"duplicate token {token!r}", path, lineno)
            vocab[token] = len(rows)
            rows.append(vec)
    if not rows:
        raise ParseError("no vectors found", path)
    return EmbeddingTable(vocab, np.array(rows))


def save_embeddings_text(table, path):
    words = sorted(table.vocabulary, key=table.vocabulary.get)
    with open(path, "w", encoding="utf-8") as fh:
        for w in words:
            fh.write(w + " " + " ".join(f"{v:.17g}" for v in table.vector(w)) + "\n")


def sentence_vector(doc, table):
    """Unit-normalized mean of the in-vocabulary token vectors of ``doc``."""
    tokens = getattr(doc, "tokens", doc)
    rows = [table.vocabulary[t] for t in tokens if t in table.vocabulary]
    if not rows:
        raise DegenerateInputError("no token of the document is in the embedding vocabulary")
    mean = table.vectors[rows].mean(axis=0)
    norm = np.linalg.norm(mean)
    if norm == 0.0:
        raise DegenerateInputError("token vectors average to zero")
    return mean / norm
