"""
Loading per-channel CSV recordings, resampling, and speed/GSR alignment.

A session is a directory (or a ``.zip`` archive of one) holding one CSV per
channel, each with a ``t,value`` header.  ``meta.json`` may declare sample
rates under ``"sample_rate_hz"``; otherwise the rate is the reciprocal of the
median timestamp spacing.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyChannel, MalformedCsv, MissingChannel, NoOverlap

log = logging.getLogger(__name__)

DEFAULT_RATE_HZ = 4.0
_GRID_EPS = 1e-9
# files that live next to the channels but are not channels
_SIDECARS = ("meta.json", "truth.json")


@dataclass(frozen=True)
class ChannelSchema:
    required: tuple[str, ...] = ("speed", "gsr")
    optional: tuple[str, ...] = ("rotation", "bvp", "temp", "hr")

    @property
    def known(self) -> tuple[str, ...]:
        return self.required + self.optional


DEFAULT_SCHEMA = ChannelSchema()


@dataclass
class RawChannel:
    """One recorded stream.

    ``t`` holds explicit timestamps when the recording carried them; when it
    is ``None`` the samples sit on the uniform grid ``t0 + k / sample_rate_hz``.
    """

    name: str
    sample_rate_hz: float
    t0: float
    values: np.ndarray
    t: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size == 0:
            raise EmptyChannel(self.name)
        if not self.sample_rate_hz > 0:
            raise ValueError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")
        if self.t is not None:
            self.t = np.asarray(self.t, dtype=float)
            if self.t.shape != self.values.shape:
                raise ValueError(f"{self.name}: timestamps and values differ in length")

    def timestamps(self) -> np.ndarray:
        if self.t is not None:
            return self.t
        return self.t0 + np.arange(self.values.size) / self.sample_rate_hz

    @property
    def t_end(self) -> float:
        return float(self.timestamps()[-1])


@dataclass
class RawSession:
    participant_id: str
    channels: dict[str, RawChannel]
    warnings: list[str] = field(default_factory=list)

    def require(self, *names: str) -> None:
        for name in names:
            if name not in self.channels:
                raise MissingChannel(name)


@dataclass
class AlignedSession:
    """Speed and GSR on one uniform grid.

    ``t`` is measured from ``t_start`` (epoch seconds of the first sample) so
    the grid spacing stays exact in double precision.
    """

    participant_id: str
    rate_hz: float
    t: np.ndarray
    speed: np.ndarray
    gsr: np.ndarray
    t_start: float = 0.0

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.speed = np.asarray(self.speed, dtype=float)
        self.gsr = np.asarray(self.gsr, dtype=float)
        n = self.t.size
        if n < 2 or self.speed.size != n or self.gsr.size != n:
            raise ValueError("t, speed and gsr must share one length >= 2")
        step = np.diff(self.t)
        if np.any(np.abs(step - 1.0 / self.rate_hz) > _GRID_EPS):
            raise ValueError("t must be uniformly spaced at 1/rate_hz")

    def __len__(self):
        return self.t.size


# --------------------------------------------------------------------------
# CSV reading / writing


def parse_channel_csv(text: str, name: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse ``t,value`` CSV text into (t, values).

    Raises MalformedCsv naming the offending data row (1-based, header
    excluded) and EmptyChannel when there are no data rows.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise EmptyChannel(name)
    if [h.strip() for h in header] != ["t", "value"]:
        raise MalformedCsv(f"{name}: expected header 't,value', got {','.join(header)!r}")
    ts, vs = [], []
    for row_index, row in enumerate(reader, start=1):
        if not row:
            continue
        if len(row) != 2:
            raise MalformedCsv(f"{name}: row {row_index} has {len(row)} fields, expected 2")
        try:
            t, v = float(row[0]), float(row[1])
        except ValueError:
            raise MalformedCsv(f"{name}: row {row_index} is not numeric: {','.join(row)!r}") from None
        ts.append(t)
        vs.append(v)
    if not ts:
        raise EmptyChannel(name)
    return np.array(ts), np.array(vs)


def format_csv(header: tuple[str, ...], columns, fmt=repr) -> str:
    """Emit CSV text with LF endings. ``fmt`` renders each float."""
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_channel_csv(path, t, values) -> None:
    Path(path).write_text(format_csv(("t", "value"), (t, values)), encoding="utf-8", newline="\n")


def infer_rate(t: np.ndarray) -> float:
    if t.size < 2:
        # a single sample carries no spacing; fall back to the GSR-native rate
        return DEFAULT_RATE_HZ
    dt = float(np.median(np.diff(t)))
    if not dt > 0:
        raise MalformedCsv("timestamps are not increasing")
    return 1.0 / dt


def _read_members(path: Path) -> tuple[str, dict[str, str]]:
    """Return (participant_id, {filename: text}) for a directory or zip archive."""
    if path.is_dir():
        files = {p.name: p.read_text(encoding="utf-8") for p in sorted(path.iterdir()) if p.is_file()}
        return path.name, files
    if zipfile.is_zipfile(path):
        files = {}
        with zipfile.ZipFile(path) as zf:
            for info in sorted(zf.infolist(), key=lambda i: i.filename):
                if info.is_dir():
                    continue
                files[Path(info.filename).name] = zf.read(info).decode("utf-8")
        return path.stem, files
    raise FileNotFoundError(f"not a session directory or zip archive: {path}")


def load_session(path, schema: ChannelSchema = DEFAULT_SCHEMA) -> RawSession:
    path = Path(path)
    participant_id, files = _read_members(path)

    rates = {}
    if "meta.json" in files:
        meta = json.loads(files["meta.json"])
        rates = {k: float(v) for k, v in meta.get("sample_rate_hz", {}).items()}
        participant_id = meta.get("participant_id", participant_id)

    channels: dict[str, RawChannel] = {}
    warnings = []
    for fname, text in files.items():
        stem, ext = fname.rsplit(".", 1) if "." in fname else (fname, "")
        if fname in _SIDECARS:
            continue
        if ext != "csv" or stem not in schema.known:
            msg = f"ignoring unrecognized file {fname!r}"
            log.warning(msg)
            warnings.append(msg)
            continue
        t, values = parse_channel_csv(text, stem)
        rate = rates.get(stem) or infer_rate(t)
        channels[stem] = RawChannel(stem, rate, float(t[0]), values, t=t)

    session = RawSession(participant_id, channels, warnings)
    session.require(*schema.required)
    return session


# --------------------------------------------------------------------------
# resampling and alignment


def _uniform_grid(start: float, stop: float, rate_hz: float) -> np.ndarray:
    count = int(np.floor((stop - start) * rate_hz + _GRID_EPS)) + 1
    return start + np.arange(count) / rate_hz


def resample(channel: RawChannel, target_hz: float) -> RawChannel:
    """Linearly interpolate a channel onto a uniform grid at ``target_hz``.

    The grid starts at the first sample and covers the original span; values
    past the last original sample are clamped to it, never extrapolated.
    """
    if channel.values.size < 2:
        raise EmptyChannel(f"{channel.name}: need at least 2 samples to resample")
    if not target_hz > 0:
        raise ValueError(f"target_hz must be > 0, got {target_hz}")
    src_t = channel.timestamps()
    grid = _uniform_grid(float(src_t[0]), float(src_t[-1]), target_hz)
    values = np.interp(grid, src_t, channel.values)
    return RawChannel(channel.name, target_hz, float(grid[0]), values)


def align(session: RawSession, rate_hz: float = DEFAULT_RATE_HZ) -> AlignedSession:
    """Resample speed and GSR onto one grid over the intersection of their spans."""
    session.require("speed", "gsr")
    speed, gsr = session.channels["speed"], session.channels["gsr"]
    lo = max(speed.t0, gsr.t0)
    hi = min(speed.t_end, gsr.t_end)
    if hi < lo:
        raise NoOverlap(f"speed [{speed.t0}, {speed.t_end}] and gsr [{gsr.t0}, {gsr.t_end}] are disjoint")
    grid = _uniform_grid(0.0, hi - lo, rate_hz)
    if grid.size < 2:
        raise NoOverlap(f"overlap [{lo}, {hi}] holds fewer than 2 samples at {rate_hz} Hz")
    return AlignedSession(
        participant_id=session.participant_id,
        rate_hz=rate_hz,
        t=grid,
        speed=np.interp(grid, speed.timestamps() - lo, speed.values),
        gsr=np.interp(grid, gsr.timestamps() - lo, gsr.values),
        t_start=lo,
    )


def write_session(session: AlignedSession, out_dir) -> Path:
    """Write an aligned session back out in the directory layout ``load_session`` reads."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t = session.t + session.t_start
    write_channel_csv(out / "speed.csv", t, session.speed)
    write_channel_csv(out / "gsr.csv", t, session.gsr)
    meta = {
        "participant_id": session.participant_id,
        "sample_rate_hz": {"speed": session.rate_hz, "gsr": session.rate_hz},
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out
