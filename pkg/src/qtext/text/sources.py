"""Materialize the IMDB review corpus from the ``movie-reviews`` package.

That package ships 25 000 labeled IMDB reviews (half positive, half
negative) in one CSV.  :func:`export_imdb` writes them out in the
``root/pos/*.txt`` / ``root/neg/*.txt`` layout read by ``load_imdb``.
"""

import csv
import io
from importlib import resources
from pathlib import Path

from ..errors import DataLayoutError

_CSV = "data/combined_movie_reviews.csv"


def _rows():
    try:
        ref = resources.files("movie_reviews") / _CSV
    except ModuleNotFoundError:
        raise DataLayoutError(
            "the movie-reviews package is not installed (pip install movie-reviews)"
        ) from None
    text = ref.read_text(encoding="utf-8")
    for row in csv.DictReader(io.StringIO(text)):
        if row["source"] == "imdb":
            yield row["text"], int(row["label"])


def export_imdb(root, limit_per_class=None):
    """Write the reviews under ``root``; returns ``{"pos": n, "neg": m}``.

    Files are numbered in corpus order, so lexicographic file order equals
    the package's row order.  A finished export with the same
    ``limit_per_class`` is reused as is.
    """
    root = Path(root)
    marker = root / ".complete"
    stamp = f"limit={limit_per_class}\n"
    if marker.exists() and marker.read_text() == stamp:
        return {name: len(list((root / name).glob("*.txt"))) for name in ("neg", "pos")}
    existing = [f for name in ("neg", "pos") for f in (root / name).glob("*.txt")]
    if existing and not marker.exists():
        raise DataLayoutError(f"{root} already holds reviews not written by export_imdb")
    for old in existing:
        old.unlink()
    counts = {"neg": 0, "pos": 0}
    for name in counts:
        (root / name).mkdir(parents=True, exist_ok=True)
    for text, label in _rows():
        name = "pos" if label == 1 else "neg"
        if limit_per_class is not None and counts[name] >= limit_per_class:
            continue
        (root / name / f"{counts[name]:05d}.txt").write_text(text, encoding="utf-8")
        counts[name] += 1
    marker.write_text(stamp)
    return counts
