"""
On-disk cache of classified tables and subobject profiles.

One JSON file per (spec hash, q, strategy, dimension vector).  Files carry a
version header; anything unreadable or mismatched is ignored and recomputed.
Writes go to a temporary file that is then renamed into place.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path

from .quiver import format_dim
from .repcat import ClassRecord, IsoTable, RepCategory, Representation

log = logging.getLogger(__name__)

CACHE_VERSION = 1


class TableStore:
    def __init__(self, root: str | os.PathLike, spec_hash: str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.spec_hash = spec_hash
        self._dirty: set[tuple] = set()

    def path(self, cat: RepCategory, d) -> Path:
        return self.root / f"{self.spec_hash}-q{cat.F.q}-{cat.strategy}-{format_dim(d)}.json"

    def load_table(self, cat: RepCategory, d) -> IsoTable | None:
        p = self.path(cat, d)
        if not p.is_file():
            return None
        try:
            data = json.loads(p.read_text())
            if data.get("version") != CACHE_VERSION or data.get("spec_hash") != self.spec_hash:
                return None
            if tuple(data["dim"]) != tuple(d) or data["q"] != cat.F.q:
                return None
            classes = []
            for k, rec in enumerate(data["classes"]):
                rep = Representation.from_json(cat.qv, d, rec["mats"])
                summands = tuple((tuple(s[0]), int(s[1])) for s in rec["summands"])
                classes.append(ClassRecord((tuple(d), k), rep, int(rec["aut"]), bool(rec["indecomposable"]),
                                           summands, int(rec["end_dim"]), int(rec["residue_degree"])))
            table = cat._finalize(tuple(d), classes)
            for xk, per_dim in data.get("profiles", {}).items():
                for e_s, entries in per_dim.items():
                    e = tuple(int(v) for v in e_s.split("."))
                    prof = {
                        ((tuple(u[0]), int(u[1])), (tuple(w[0]), int(w[1]))): int(n)
                        for u, w, n in entries
                    }
                    cat._profiles[((tuple(d), int(xk)), e)] = prof
            return table
        except (OSError, ValueError, KeyError, TypeError, IndexError) as exc:
            log.warning("ignoring unreadable cache entry %s: %s", p, exc)
            return None

    def save(self, cat: RepCategory, d) -> None:
        d = tuple(d)
        table = cat._tables[d]
        profiles: dict[str, dict] = {}
        for (x, e), prof in sorted(cat._profiles.items()):
            if x[0] != d:
                continue
            profiles.setdefault(str(x[1]), {})[format_dim(e)] = [
                [[list(u[0]), u[1]], [list(w[0]), w[1]], n] for (u, w), n in sorted(prof.items())
            ]
        payload = {
            "version": CACHE_VERSION,
            "spec_hash": self.spec_hash,
            "q": cat.F.q,
            "dim": list(d),
            "classes": [
                {
                    "mats": c.rep.to_json(),
                    "aut": c.aut_order,
                    "indecomposable": c.indecomposable,
                    "summands": [[list(s[0]), s[1]] for s in c.summands],
                    "end_dim": c.end_dim,
                    "residue_degree": c.residue_degree,
                }
                for c in table.classes
            ],
            "profiles": profiles,
        }
        target = self.path(cat, d)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh, sort_keys=True)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self._dirty.discard(d)

    def mark_dirty(self, d) -> None:
        self._dirty.add(tuple(d))

    def flush(self, cat: RepCategory) -> None:
        for d in sorted(self._dirty):
            if d in cat._tables:
                self.save(cat, d)
        self._dirty.clear()
