"""Trajectory CSV files: ``time,specie,count``.

One block of rows per snapshot, species sorted lexicographically. A
snapshot with no live species is written as a single row with an empty
specie and count 0 so that it survives a round trip.
"""

import csv
import io
from typing import Dict, Iterable, List, TextIO, Tuple

HEADER = ("time", "specie", "count")

Snapshot = Tuple[float, Dict[str, int]]


def snapshot_rows(t: float, counts: Dict[str, int]) -> List[Tuple[str, str, str]]:
    time = repr(float(t))
    if not counts:
        return [(time, "", "0")]
    return [(time, s, str(counts[s])) for s in sorted(counts)]


class TrajectoryWriter:
    def __init__(self, fh: TextIO):
        self._writer = csv.writer(fh, lineterminator="\n")
        self._writer.writerow(HEADER)
        self.last = None

    def write(self, t: float, counts: Dict[str, int]) -> None:
        self._writer.writerows(snapshot_rows(t, counts))
        self.last = (float(t), dict(counts))


def write_trajectory(fh: TextIO, snapshots: Iterable[Snapshot]) -> None:
    writer = TrajectoryWriter(fh)
    for t, counts in snapshots:
        writer.write(t, counts)


def read_trajectory(fh: TextIO) -> List[Snapshot]:
    """Parse a trajectory back into ``(time, counts)`` snapshots."""
    reader = csv.reader(fh)
    header = next(reader, None)
    if tuple(header or ()) != HEADER:
        raise ValueError(f"not a trajectory file, header {header!r}")
    snapshots: List[Snapshot] = []
    current_time = None
    current: Dict[str, int] = {}
    for row in reader:
        if len(row) != 3:
            raise ValueError(f"malformed row {row!r}")
        t, specie, count = float(row[0]), row[1], int(row[2])
        if current_time is None or t != current_time or specie in current or not specie:
            if current_time is not None:
                snapshots.append((current_time, current))
            current_time, current = t, {}
        if specie:
            current[specie] = count
    if current_time is not None:
        snapshots.append((current_time, current))
    return snapshots


def dumps(snapshots: Iterable[Snapshot]) -> str:
    buf = io.StringIO()
    write_trajectory(buf, snapshots)
    return buf.getvalue()


def loads(text: str) -> List[Snapshot]:
    return read_trajectory(io.StringIO(text))
