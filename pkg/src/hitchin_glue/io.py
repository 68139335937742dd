"""Serialization: JSON records, CSV tables and the on-disk Toda solution cache."""

from __future__ import annotations

import csv
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CacheCorrupt
from .toda import SCHEMA_VERSION, RadialGrid, SolverConfig, TodaSolution, solve_toda

log = logging.getLogger(__name__)

CACHE_ENV = "HITCHIN_GLUE_CACHE"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "hitchin_glue"


def fmt(x) -> str:
    """Float with 17 significant digits (exact round-trip)."""
    return format(float(x), ".17g")


# ---------------------------------------------------------------- atomic writes


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, data) -> None:
    atomic_write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """CSV with mandatory header; floats as ``.17g``, other cells via ``str``."""
    import io as _io

    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row])
    atomic_write_text(path, buf.getvalue())


# ---------------------------------------------------------------- solutions


def solution_to_record(sol: TodaSolution) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "K": sol.K,
        "t": sol.t,
        "r": sol.r.tolist(),
        "u": sol.u.tolist(),
        "residual_norm": sol.residual_norm,
        "config": sol.config.to_dict(),
        "config_hash": sol.config.digest(),
    }


def solution_from_record(data: dict) -> TodaSolution:
    if data.get("schema_version") != SCHEMA_VERSION:
        raise CacheCorrupt(f"unsupported schema version {data.get('schema_version')!r}")
    cfg = SolverConfig(**data["config"])
    if data.get("config_hash", cfg.digest()) != cfg.digest():
        raise CacheCorrupt("stored config hash does not match the stored config")
    return TodaSolution(
        int(data["K"]),
        RadialGrid(np.asarray(data["r"], dtype=float)),
        np.asarray(data["u"], dtype=float),
        float(data["residual_norm"]),
        float(data["t"]),
        cfg,
    )


def write_solution_csv(path: Path, sol: TodaSolution) -> None:
    header = ["r"] + [f"u_{i}" for i in range(1, sol.K + 1)]
    rows = (
        [float(r)] + [float(v) for v in col]
        for r, col in zip(sol.r, sol.u.T)
    )
    write_csv(path, header, rows)


# ---------------------------------------------------------------- cache


class SolutionCache:
    """Directory of Toda solutions keyed by ``(K, config digest)``."""

    def __init__(self, directory: Path | str | None = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def path(self, K: int, config: SolverConfig) -> Path:
        return self.directory / f"toda_K{K}_{config.digest()[:24]}.json"

    def lookup(self, K: int, config: SolverConfig, strict: bool = False) -> TodaSolution | None:
        """Cached solution, or ``None`` on a miss.

        An unreadable file is a miss with a logged warning (``strict``
        raises :class:`CacheCorrupt` instead).
        """
        path = self.path(K, config)
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            sol = solution_from_record(data)
        except (OSError, ValueError, KeyError, TypeError, CacheCorrupt) as exc:
            if strict:
                raise CacheCorrupt(f"{path}: {exc}") from exc
            log.warning("ignoring unreadable cache entry %s: %s", path, exc)
            return None
        if sol.K != K or data.get("config_hash") != config.digest():
            return None
        return sol

    def store(self, sol: TodaSolution) -> Path:
        path = self.path(sol.K, sol.config)
        write_json(path, solution_to_record(sol))
        return path

    def get_or_solve(self, K: int, config: SolverConfig) -> tuple[TodaSolution, bool]:
        """Return ``(solution, was_cached)``."""
        sol = self.lookup(K, config)
        if sol is not None:
            return sol, True
        sol = solve_toda(K, config)
        self.store(sol)
        return sol, False
