"""Experiment configuration files.

Grammar: UTF-8 text, one ``key = value`` per line, ``#`` or ``;`` starts a
comment line, keys are case-insensitive.  No sections.  Integer lists
(``dims``, ``seeds``) accept comma-separated items and inclusive ranges,
e.g. ``seeds = 0-19`` or ``dims = 2, 4, 8``; ``maps`` is a comma list.

Recognized keys and defaults::

    dataset = lambeq            # lambeq | imdb
    data_path =                 # lambeq: directory with mc_*_data.txt (bundled copy if empty)
                                # imdb: directory with pos/ and neg/
    embedding = self            # self (PPMI vectors trained on the dataset) or a vector file
    dim = 8                     # embedding dimension for embed / kernel / train-eval
    dims =                      # experiment sweep; defaults to dim
    window = 5
    max_vocab =                 # keep only the most frequent words (empty: all)
    min_count = 1
    map = amplitude             # amplitude | zz | classical-linear
    maps =                      # experiment sweep; defaults to map
    qubits = auto               # auto or an integer
    amplitude_qubits = dim      # auto rule for amplitude: dim (n features on n qubits) | log2
    reps = 2                    # ZZ repetitions
    shots = 10000               # 0 means exact kernels
    seed = 0
    seeds =                     # experiment seeds; defaults to seed
    n_train = 40                # imdb subset sizes (lambeq uses its fixed 70/30 split)
    n_test = 10
    C = 1.0
    tol = 1e-3
    max_passes = 1000
    workdir = .
"""

import configparser
import math
from dataclasses import asdict, dataclass, field, replace

from .errors import ConfigError

DATASETS = ("lambeq", "imdb")
MAPS = ("amplitude", "zz", "classical-linear")


def parse_int_list(text):
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        lo, dash, hi = item.partition("-")
        try:
            if dash and lo:
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(item))
        except ValueError:
            raise ConfigError(f"bad integer list item {item!r}") from None
    return tuple(out)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str = "lambeq"
    data_path: str = ""
    embedding: str = "self"
    dim: int = 8
    dims: tuple = ()
    window: int = 5
    max_vocab: int = None
    min_count: int = 1
    map: str = "amplitude"
    maps: tuple = ()
    qubits: int = None
    amplitude_qubits: str = "dim"
    reps: int = 2
    shots: int = 10000
    seed: int = 0
    seeds: tuple = ()
    n_train: int = 40
    n_test: int = 10
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 1000
    workdir: str = "."
    source: str = field(default="", compare=False)

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ConfigError(f"dataset must be one of {DATASETS}, got {self.dataset!r}")
        for m in (self.map,) + tuple(self.maps):
            if m not in MAPS:
                raise ConfigError(f"map must be one of {MAPS}, got {m!r}")
        for d in (self.dim,) + tuple(self.dims):
            if d < 1:
                raise ConfigError(f"embedding dimension must be >= 1, got {d}")
        if self.qubits is not None and self.qubits < 1:
            raise ConfigError(f"qubits must be >= 1, got {self.qubits}")
        if self.amplitude_qubits not in ("dim", "log2"):
            raise ConfigError("amplitude_qubits must be 'dim' or 'log2'")
        for key in ("window", "reps", "min_count"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be >= 1, got {getattr(self, key)}")
        if self.max_vocab is not None and self.max_vocab < 1:
            raise ConfigError("max_vocab must be >= 1")
        if self.shots < 0 or self.seed < 0 or any(s < 0 for s in self.seeds):
            raise ConfigError("shots and seeds must be >= 0")
        if not self.C > 0 or not self.tol > 0 or self.max_passes < 1:
            raise ConfigError("C and tol must be positive and max_passes >= 1")

    @property
    def sweep_dims(self):
        return tuple(self.dims) or (self.dim,)

    @property
    def sweep_maps(self):
        return tuple(self.maps) or (self.map,)

    @property
    def sweep_seeds(self):
        return tuple(self.seeds) or (self.seed,)

    def qubits_for(self, kind, dim):
        """Register size for ``kind`` on ``dim`` features (0 for the classical kernel)."""
        if kind == "classical-linear":
            return 0
        if kind == "zz":
            if self.qubits is not None and self.qubits != dim:
                raise ConfigError(f"the ZZ map needs one qubit per feature: qubits={self.qubits}, dim={dim}")
            return dim
        if self.qubits is not None:
            if dim > 1 << self.qubits:
                raise ConfigError(f"{dim} features do not fit in {self.qubits} qubits")
            return self.qubits
        if self.amplitude_qubits == "dim":
            return dim
        return max(1, math.ceil(math.log2(dim)))

    def echo(self):
        """Plain dict of the settings, for reports."""
        d = asdict(self)
        d.pop("source")
        for k in ("dims", "maps", "seeds"):
            d[k] = list(d[k])
        return d

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


_INT = {"dim", "window", "max_vocab", "min_count", "qubits", "reps", "shots", "seed", "n_train", "n_test", "max_passes"}
_FLOAT = {"c", "tol"}
_NAMES = {f.lower(): f for f in ExperimentConfig.__dataclass_fields__}


def parse_config_text(text, source=""):
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",)
    )
    try:
        parser.read_string("[config]\n" + text, source=source or "<config>")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {source}: {exc}") from None
    extra = [s for s in parser.sections() if s != "config"]
    if extra:
        raise ConfigError(f"config files have no sections, found [{extra[0]}]")
    values = {}
    for key, raw in parser.items("config"):
        key = key.lower()
        raw = raw.strip()
        if key not in _NAMES or key == "source":
            raise ConfigError(f"unknown config key {key!r}")
        try:
            if key in ("dims", "seeds"):
                value = parse_int_list(raw)
            elif key == "maps":
                value = tuple(m.strip() for m in raw.split(",") if m.strip())
            elif key in ("qubits", "max_vocab") and raw.lower() in ("", "auto", "none"):
                value = None
            elif key in _INT:
                value = int(raw)
            elif key in _FLOAT:
                value = float(raw)
            else:
                value = raw
        except ValueError:
            raise ConfigError(f"bad value for {key}: {raw!r}") from None
        values[_NAMES[key]] = value
    return ExperimentConfig(source=source, **values)


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config_text(text, str(path))
