"""Experiment configuration: JSON round-trip, validation, canonical hashing.

One flat record drives every experiment.  Grid experiments read their list
fields (n_list, fdts_list, f_d_hz_list, snr_db_list); when a list is empty
it falls back to the scalar field or a built-in default grid, resolved at
construction so the stored config is always explicit.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, fields

__all__ = [
    "ConfigError",
    "EXPERIMENTS",
    "MODES",
    "ExperimentConfig",
    "load_config",
    "save_config",
    "paper_preset",
]

EXPERIMENTS = ("eig-fit", "mse-vs-nt", "bound-tightness", "histograms", "sir-scan")
MODES = ("model", "waveform")

# Default fdts grids; 20 points for the eigenvalue fit, 10 for the SIR scan.
_EIG_FDTS = tuple(round(0.01 + i * (0.35 - 0.01) / 19, 9) for i in range(20))
_SIR_FDTS = tuple(round(0.01 * (i + 1), 9) for i in range(10))


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    profile: str = "eva"
    n_tones: int = 128
    cp_len: int = 16
    sample_period_s: float = 8e-7
    f_d_hz: float = 200.0
    snr_db: float = 20.0
    n_t_list: tuple = (100,)
    n_trials: int = 200
    n_pilot_seqs: int = 100
    master_seed: int = 12345
    mode: str = "model"
    out_path: str = ""
    n_list: tuple = ()
    fdts_list: tuple = ()
    f_d_hz_list: tuple = ()
    snr_db_list: tuple = ()

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("unknown experiment %r (have: %s)"
                              % (self.experiment, ", ".join(EXPERIMENTS)))
        if self.mode not in MODES:
            raise ConfigError("mode must be one of %s" % (MODES,))
        if self.n_tones < 2 or self.cp_len < 0:
            raise ConfigError("bad OFDM dimensions")
        if not self.sample_period_s > 0:
            raise ConfigError("sample_period_s must be positive")
        if self.f_d_hz < 0:
            raise ConfigError("f_d_hz must be >= 0")
        if self.n_trials < 1 or self.n_pilot_seqs < 1:
            raise ConfigError("n_trials and n_pilot_seqs must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be a non-negative integer")

        object.__setattr__(self, "n_t_list", self._int_tuple("n_t_list", self.n_t_list))
        if not all(v >= 2 for v in self.n_t_list):
            raise ConfigError("n_t_list entries must be >= 2")

        # Resolve grid fields so the stored config (and its hash) is explicit.
        n_list = self._int_tuple("n_list", self.n_list or self._default_n_list())
        if not all(v >= 2 for v in n_list):
            raise ConfigError("n_list entries must be >= 2")
        fdts = self._float_tuple("fdts_list", self.fdts_list or self._default_fdts())
        if not all(v >= 0 for v in fdts):
            raise ConfigError("fdts_list entries must be >= 0")
        fd_list = self._float_tuple("f_d_hz_list", self.f_d_hz_list or (self.f_d_hz,))
        snr_list = self._float_tuple("snr_db_list", self.snr_db_list or (self.snr_db,))
        object.__setattr__(self, "n_list", n_list)
        object.__setattr__(self, "fdts_list", fdts)
        object.__setattr__(self, "f_d_hz_list", fd_list)
        object.__setattr__(self, "snr_db_list", snr_list)

    def _default_n_list(self):
        if self.experiment == "eig-fit":
            return (128, 256, 512, 1024)
        return (self.n_tones,)

    def _default_fdts(self):
        if self.experiment == "eig-fit":
            return _EIG_FDTS
        if self.experiment == "sir-scan":
            return _SIR_FDTS
        return ()

    @staticmethod
    def _int_tuple(name, values):
        try:
            out = tuple(int(v) for v in values)
        except (TypeError, ValueError):
            raise ConfigError("%s must be a sequence of integers" % name)
        if any(float(o) != float(v) for o, v in zip(out, values)):
            raise ConfigError("%s must contain whole numbers" % name)
        return out

    @staticmethod
    def _float_tuple(name, values):
        try:
            return tuple(float(v) for v in values)
        except (TypeError, ValueError):
            raise ConfigError("%s must be a sequence of numbers" % name)

    def to_dict(self):
        d = asdict(self)
        for key in ("n_t_list", "n_list", "fdts_list", "f_d_hz_list", "snr_db_list"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, raw):
        if "experiment" not in raw:
            raise ConfigError("config must name an experiment")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError("unknown config keys: %s" % sorted(unknown))
        return cls(**raw)

    def replace(self, **kw):
        d = self.to_dict()
        d.update(kw)
        return self.from_dict(d)

    def config_hash(self):
        """Short stable digest of the fully resolved config."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def load_config(path):
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError("config %s is not valid JSON: %s" % (path, e))
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return ExperimentConfig.from_dict(raw)


def save_config(cfg, path):
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def paper_preset(experiment):
    """Field overrides that reproduce the published figure scales."""
    common = {
        "n_tones": 128,
        "cp_len": 16,
        "sample_period_s": 8e-7,
        "f_d_hz": 200.0,
        "snr_db": 20.0,
    }
    per_exp = {
        "eig-fit": {"n_list": (128, 256, 512, 1024), "fdts_list": _EIG_FDTS},
        "mse-vs-nt": {"n_t_list": (25, 50, 100, 200, 400, 800), "n_trials": 500},
        "bound-tightness": {
            "n_t_list": (25, 50, 100, 200, 400, 800),
            "n_trials": 50,
            "n_pilot_seqs": 100,
        },
        "histograms": {
            "n_t_list": (200,),
            "n_trials": 10000,
            "snr_db_list": (10.0, 15.0, 20.0),
            "f_d_hz_list": (100.0, 200.0, 300.0),
        },
        "sir-scan": {"fdts_list": _SIR_FDTS, "n_trials": 1000},
    }
    if experiment not in per_exp:
        raise ConfigError("unknown experiment %r" % (experiment,))
    out = dict(common)
    out.update(per_exp[experiment])
    return out
