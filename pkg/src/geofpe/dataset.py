"""Trajectory dataset pipeline: parse, clean, sample, encrypt, decrypt, synthesize.

Input files follow the taxi-trace convention "id,datetime,longitude,latitude",
one file per vehicle named <vehicle_id>.txt.  Encrypted files prepend a
coordinate id column; decrypted files restore the original four-column layout
byte for byte.
"""

from __future__ import annotations

import datetime
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .cipher import CoordinateCipher
from .coords import (
    DecimalNumber,
    GeoPoint,
    ParseError,
    decompose,
    recombine,
    validate_point,
)
from .mapstore import MappingStore
from .ranges import RT_PASSTHROUGH, range_type

log = logging.getLogger("geofpe.dataset")

SYNTH_FRAC_DIGITS = 5


@dataclass
class TrajectoryRecord:
    vehicle_id: str
    timestamp: str  # passed through byte-exactly
    point: GeoPoint
    coord_id: int | None = None


def parse_line(text: str) -> TrajectoryRecord:
    """Parse one "id,datetime,lon,lat" line; ParseError on malformed input."""
    fields = text.rstrip("\r\n").split(",")
    if len(fields) != 4:
        raise ParseError(f"expected 4 comma-separated fields, got {len(fields)}")
    vid, timestamp, lon_text, lat_text = fields
    return TrajectoryRecord(
        vid, timestamp, GeoPoint(decompose(lon_text), decompose(lat_text))
    )


def clean(records) -> tuple[list, int]:
    """Drop records with out-of-range coordinates; return (kept, drop count)."""
    kept = [r for r in records if validate_point(r.point) is None]
    return kept, len(records) - len(kept)


@dataclass
class FileScan:
    records: list[TrajectoryRecord] = field(default_factory=list)
    errors: list[tuple[int, str]] = field(default_factory=list)  # (line no, reason)
    parse_errors: int = 0
    dropped: int = 0


def scan_file(path: Path) -> FileScan:
    """Parse and clean one trajectory file, keeping per-line error reasons."""
    scan = FileScan()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip() == "":
                continue
            try:
                rec = parse_line(line)
            except ParseError as exc:
                scan.errors.append((line_no, f"parse error: {exc}"))
                scan.parse_errors += 1
                continue
            axis = validate_point(rec.point)
            if axis is not None:
                scan.errors.append((line_no, f"out of range: {axis}"))
                scan.dropped += 1
                continue
            scan.records.append(rec)
    return scan


def stratified_sample(trajectories, n_total: int, seed) -> list[tuple[str, int]]:
    """Sample n_total (vehicle, position) pairs, quota per vehicle proportional
    to its point count (largest-remainder rounding), uniform without
    replacement inside each vehicle.  Deterministic for a fixed seed."""
    sizes = {vid: len(seq) for vid, seq in trajectories.items()}
    population = sum(sizes.values())
    if n_total > population:
        raise ValueError(f"sample size {n_total} exceeds population {population}")
    if n_total < 0:
        raise ValueError("sample size must be non-negative")
    vids = sorted(sizes)
    quotas = {}
    remainders = []
    assigned = 0
    for vid in vids:
        q, r = divmod(n_total * sizes[vid], population)
        quotas[vid] = q
        assigned += q
        remainders.append((-r, vid))
    remainders.sort()
    for _, vid in remainders[: n_total - assigned]:
        quotas[vid] += 1
    sample = []
    for vid in vids:
        k = quotas[vid]
        if k == 0:
            continue
        rng = random.Random(f"{seed}:{vid}")
        for idx in sorted(rng.sample(range(sizes[vid]), k)):
            sample.append((vid, idx))
    return sample


# ---------------------------------------------------------------------------
# Encryption / decryption pipeline


@dataclass
class EncryptStats:
    files: int = 0
    records: int = 0
    dropped: int = 0
    parse_errors: int = 0
    passthrough: int = 0
    failed_files: list[str] = field(default_factory=list)


@dataclass
class DecryptStats:
    files: int = 0
    records: int = 0
    record_errors: int = 0
    fuzzy_restored: int = 0
    failed_files: list[str] = field(default_factory=list)


def _dataset_files(input_dir: Path) -> list[Path]:
    return sorted(
        p for p in Path(input_dir).iterdir() if p.is_file() and p.suffix == ".txt"
    )


def _run_indexed(fn, jobs, workers: int):
    if workers <= 1:
        return [fn(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _write_sidecar(out_path: Path, errors) -> None:
    if not errors:
        return
    with open(f"{out_path}.errors", "w", encoding="utf-8") as fh:
        for line_no, reason in errors:
            fh.write(f"{line_no}: {reason}\n")


def encrypt_dataset(
    input_dir,
    out_dir,
    cipher: CoordinateCipher,
    store: MappingStore,
    workers: int = 1,
) -> EncryptStats:
    """Encrypt every trajectory file under input_dir into out_dir.

    Coordinate ids are sequential over the cleaned records in sorted-filename
    order, so the output is byte-identical for any worker count.
    """
    input_dir, out_dir = Path(input_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = _dataset_files(input_dir)
    stats = EncryptStats(files=len(files))

    counts = _run_indexed(lambda p: len(scan_file(p).records), files, workers)
    offsets = []
    running = 0
    for n in counts:
        offsets.append(running)
        running += n

    def encrypt_file(job):
        path, offset = job
        scan = scan_file(path)
        lines = []
        passthrough = 0
        for i, rec in enumerate(scan.records):
            cid = offset + i
            lon, lat = rec.point.lon, rec.point.lat
            if range_type(lon.int_part, True, True) == RT_PASSTHROUGH:
                passthrough += 1
            if range_type(lat.int_part, False, True) == RT_PASSTHROUGH:
                passthrough += 1
            enc_lon = cipher.encrypt_number(lon, "lon")
            enc_lat = cipher.encrypt_number(lat, "lat")
            store.record("lon_int", cid, enc_lon.int_part, lon.int_part)
            store.record("lon_frac", cid, enc_lon.frac_value, lon.frac_value, lon.frac_digits)
            store.record("lat_int", cid, enc_lat.int_part, lat.int_part)
            store.record("lat_frac", cid, enc_lat.frac_value, lat.frac_value, lat.frac_digits)
            lines.append(
                f"{cid},{rec.vehicle_id},{rec.timestamp},"
                f"{recombine(enc_lon)},{recombine(enc_lat)}\n"
            )
        out_path = out_dir / path.name
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.writelines(lines)
        _write_sidecar(out_path, scan.errors)
        return scan, passthrough

    for scan, passthrough in _run_indexed(
        encrypt_file, list(zip(files, offsets)), workers
    ):
        stats.records += len(scan.records)
        stats.dropped += scan.dropped
        stats.parse_errors += scan.parse_errors
        stats.passthrough += passthrough
    return stats


def decrypt_dataset(
    enc_dir,
    out_dir,
    store: MappingStore,
    workers: int = 1,
) -> DecryptStats:
    """Restore original coordinate text from encrypted files via the store.

    An exact composite-key lookup is tried first; on a miss, a fuzzy lookup
    by encrypted value alone is accepted when unambiguous.  Records that
    still cannot be resolved are reported in a per-file .errors sidecar; the
    rest of the file is written regardless.
    """
    enc_dir, out_dir = Path(enc_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = _dataset_files(enc_dir)
    stats = DecryptStats(files=len(files))

    def decrypt_file(path: Path):
        lines = []
        errors = []
        fuzzy_used = 0
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if line.strip() == "":
                    continue
                fields = line.rstrip("\r\n").split(",")
                if len(fields) != 5:
                    errors.append((line_no, f"expected 5 fields, got {len(fields)}"))
                    continue
                cid_text, vid, timestamp, enc_lon_text, enc_lat_text = fields
                try:
                    cid = int(cid_text)
                    enc_lon = decompose(enc_lon_text)
                    enc_lat = decompose(enc_lat_text)
                except (ValueError, ParseError) as exc:
                    errors.append((line_no, f"parse error: {exc}"))
                    continue
                parts = {}
                failure = None
                for kind, enc_value in (
                    ("lon_int", enc_lon.int_part),
                    ("lon_frac", enc_lon.frac_value),
                    ("lat_int", enc_lat.int_part),
                    ("lat_frac", enc_lat.frac_value),
                ):
                    orig = store.lookup_exact(kind, cid, enc_value)
                    if orig is None:
                        orig = store.lookup_fuzzy(kind, enc_value)
                        if not isinstance(orig, int):
                            failure = (
                                f"no {kind} mapping for coord_id {cid} "
                                f"(fuzzy: {'ambiguous' if orig else 'not found'})"
                            )
                            break
                        fuzzy_used += 1
                    parts[kind] = orig
                if failure is not None:
                    errors.append((line_no, failure))
                    continue
                lon = DecimalNumber(
                    enc_lon.sign, parts["lon_int"], parts["lon_frac"], enc_lon.frac_digits
                )
                lat = DecimalNumber(
                    enc_lat.sign, parts["lat_int"], parts["lat_frac"], enc_lat.frac_digits
                )
                lines.append(f"{vid},{timestamp},{recombine(lon)},{recombine(lat)}\n")
        out_path = out_dir / path.name
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.writelines(lines)
        _write_sidecar(out_path, errors)
        return len(lines), errors, fuzzy_used

    for n_lines, errors, fuzzy_used in _run_indexed(decrypt_file, files, workers):
        stats.records += n_lines
        stats.record_errors += len(errors)
        stats.fuzzy_restored += fuzzy_used
    return stats


# ---------------------------------------------------------------------------
# Synthetic trajectory generation


@dataclass
class SynthConfig:
    n_vehicles: int
    points_per_vehicle: int
    centers: list[tuple[float, float]]  # (lon, lat) hotspot centers
    hotspot_std: float = 0.001  # degrees
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_vehicles <= 0 or self.points_per_vehicle <= 0:
            raise ValueError("vehicle and point counts must be positive")
        if self.hotspot_std <= 0:
            raise ValueError("hotspot std-dev must be positive")
        for lon, lat in self.centers:
            if not (-180 <= lon <= 180 and -90 <= lat <= 90):
                raise ValueError(f"hotspot center out of range: {lon},{lat}")


def _clamp(value: float, bound: float) -> float:
    return max(-bound, min(bound, value))


def _format_point(lon: float, lat: float) -> tuple[str, str]:
    return (
        f"{_clamp(lon, 180.0):.{SYNTH_FRAC_DIGITS}f}",
        f"{_clamp(lat, 90.0):.{SYNTH_FRAC_DIGITS}f}",
    )


def _vehicle_track(cfg: SynthConfig, vid: int) -> list[tuple[float, float]]:
    rng = random.Random(f"{cfg.seed}:vehicle:{vid}")
    n = cfg.points_per_vehicle
    points: list[tuple[float, float]] = []
    if not cfg.centers:
        # pure random walk
        lon = rng.uniform(-170.0, 170.0)
        lat = rng.uniform(-80.0, 80.0)
        for _ in range(n):
            lon += rng.gauss(0.0, 0.02)
            lat += rng.gauss(0.0, 0.02)
            points.append((lon, lat))
        return points
    cur = rng.choice(cfg.centers)
    while len(points) < n:
        # dwell at the current hotspot
        for _ in range(rng.randint(50, 90)):
            if len(points) >= n:
                break
            points.append(
                (cur[0] + rng.gauss(0.0, cfg.hotspot_std),
                 cur[1] + rng.gauss(0.0, cfg.hotspot_std))
            )
        if len(points) >= n:
            break
        # drive to the next hotspot
        nxt = rng.choice(cfg.centers)
        steps = rng.randint(18, 30)
        jitter = 3.0 * cfg.hotspot_std
        for step in range(1, steps + 1):
            if len(points) >= n:
                break
            frac = step / (steps + 1)
            points.append(
                (cur[0] + (nxt[0] - cur[0]) * frac + rng.gauss(0.0, jitter),
                 cur[1] + (nxt[1] - cur[1]) * frac + rng.gauss(0.0, jitter))
            )
        cur = nxt
    return points


def generate_synthetic(cfg: SynthConfig, out_dir) -> int:
    """Write cfg.n_vehicles trajectory files of Gaussian hotspot dwells joined
    by jittered drive segments; deterministic for a fixed seed.  Returns the
    total number of points written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = datetime.datetime(2008, 2, 2, 13, 30, 0)
    total = 0
    for vid in range(1, cfg.n_vehicles + 1):
        track = _vehicle_track(cfg, vid)
        with open(out_dir / f"{vid}.txt", "w", encoding="utf-8") as fh:
            for i, (lon, lat) in enumerate(track):
                stamp = (start + datetime.timedelta(seconds=15 * i)).strftime(
                    "%Y-%m-%d %H:%M:%S"
                )
                lon_text, lat_text = _format_point(lon, lat)
                fh.write(f"{vid},{stamp},{lon_text},{lat_text}\n")
        total += len(track)
    log.info("synthesized %d vehicles, %d points", cfg.n_vehicles, total)
    return total


# ---------------------------------------------------------------------------
# Loaders for the evaluation harness


def load_plain_points(input_dir) -> dict[str, list[tuple[float, float]]]:
    """Cleaned per-vehicle (lon, lat) floats in file order, keyed by file stem."""
    out = {}
    for path in _dataset_files(input_dir):
        scan = scan_file(path)
        out[path.stem] = [
            (r.point.lon.to_float(), r.point.lat.to_float()) for r in scan.records
        ]
    return out


def load_encrypted_points(enc_dir) -> dict[str, list[tuple[float, float]]]:
    """Per-vehicle (lon, lat) floats from encrypted files, keyed by file stem."""
    out = {}
    for path in _dataset_files(enc_dir):
        points = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip() == "":
                    continue
                fields = line.rstrip("\r\n").split(",")
                if len(fields) != 5:
                    raise ParseError(f"{path}: expected 5 fields, got {len(fields)}")
                points.append((float(fields[3]), float(fields[4])))
        out[path.stem] = points
    return out


def load_points_auto(input_dir) -> dict[str, list[tuple[float, float]]]:
    """Load a directory in either layout, detected per file by column count.

    Five columns means an encrypted file (coordinate id first); four means
    the plain layout, which gets the usual cleaning.  Lets the identity
    checks point an eval at a plain tree.
    """
    input_dir = Path(input_dir)
    out = {}
    for path in _dataset_files(input_dir):
        first = None
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    first = line
                    break
        if first is not None and len(first.rstrip("\r\n").split(",")) == 5:
            out.update(load_encrypted_points_file(path))
        else:
            scan = scan_file(path)
            out[path.stem] = [
                (r.point.lon.to_float(), r.point.lat.to_float())
                for r in scan.records
            ]
    return out


def load_encrypted_points_file(path) -> dict[str, list[tuple[float, float]]]:
    path = Path(path)
    points = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip() == "":
                continue
            fields = line.rstrip("\r\n").split(",")
            if len(fields) != 5:
                raise ParseError(f"{path}: expected 5 fields, got {len(fields)}")
            points.append((float(fields[3]), float(fields[4])))
    return {path.stem: points}
