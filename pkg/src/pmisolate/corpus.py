"""Pinned instance corpora.

The manifest lists generator runs as ``kind``, fixed ``params``, an optional
list of ``sizes`` (fed to ``size_param``, default ``n``) and an optional
half-open ``seeds`` range.  Every instance is rebuilt from those alone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .generate import generate
from .schema import EmbeddedGraph

MANIFEST = "corpus.json"


@dataclass(frozen=True)
class CorpusEntry:
    group: str
    kind: str
    seed: int
    params: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        bits = [self.kind]
        for key in sorted(self.params):
            val = self.params[key]
            if isinstance(val, list):
                val = "+".join(map(str, val))
            bits.append(f"{key}={val}")
        bits.append(f"seed={self.seed}")
        return ",".join(bits)

    def build(self) -> EmbeddedGraph:
        return generate(self.kind, self.seed, **self.params)


def load_manifest(path: str | Path | None = None) -> dict:
    if path is None:
        text = resources.files("pmisolate.data").joinpath(MANIFEST).read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return json.loads(text)


def groups(manifest: dict | None = None) -> list[str]:
    return list((manifest or load_manifest())["groups"])


def corpus(group: str, manifest: dict | None = None) -> list[CorpusEntry]:
    manifest = manifest or load_manifest()
    if group not in manifest["groups"]:
        raise KeyError(f"unknown corpus group {group!r}; known: {', '.join(manifest['groups'])}")
    out = []
    for spec in manifest["groups"][group]:
        sizes = spec.get("sizes", [None])
        lo, hi = spec.get("seeds", [0, 1])
        for size in sizes:
            params = dict(spec.get("params", {}))
            if size is not None:
                params[spec.get("size_param", "n")] = size
            for seed in range(lo, hi):
                out.append(CorpusEntry(group, spec["kind"], seed, params))
    return out
