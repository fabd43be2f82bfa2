"""Shared helpers for the experiment scripts."""
import argparse
import dataclasses
import hashlib
import json
from pathlib import Path

from cnoidal.io import write_csv, write_json  # noqa: F401  (re-exported)


def parse(cfg_cls, description):
    """Build an argparse parser from a dataclass; every field becomes an option."""
    ap = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cfg_cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        if isinstance(default, (list, tuple)):
            ap.add_argument(f"--{f.name}", type=float, nargs="+", default=list(default))
        else:
            ap.add_argument(f"--{f.name}", type=type(default), default=default)
    return cfg_cls(**vars(ap.parse_args()))


def stamp(cfg):
    """A RunConfig carrying the script config, so output files get a reproducible hash."""
    return _Stamp(json.dumps(dataclasses.asdict(cfg), sort_keys=True))


class _Stamp:
    def __init__(self, text):
        self._text = text
        self.hash = hashlib.sha256(text.encode()).hexdigest()[:16]

    def canonical(self):
        return self._text


def outdir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
