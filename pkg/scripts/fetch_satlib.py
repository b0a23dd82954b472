#!/usr/bin/env python3
"""Download and unpack SATLIB uniform random 3-SAT sets (needs network access).

    python scripts/fetch_satlib.py data/satlib uf20-91 uf100-430
    BPSAT_SATLIB=data/satlib pytest tests/test_acceptance.py
"""
import io
import sys
import tarfile
import urllib.request
from pathlib import Path

BASE = "https://www.cs.ubc.ca/~hoos/SATLIB/Benchmarks/SAT/RND3SAT/"


def fetch(name: str, dest: Path) -> None:
    target = dest / name
    target.mkdir(parents=True, exist_ok=True)
    with urllib.request.urlopen(BASE + name + ".tar.gz", timeout=60) as resp:
        data = resp.read()
    with tarfile.open(fileobj=io.BytesIO(data), mode="r:gz") as tar:
        for member in tar.getmembers():
            if member.isfile() and member.name.endswith(".cnf"):
                member.name = Path(member.name).name
                tar.extract(member, target)
    print(f"{name}: {len(list(target.glob('*.cnf')))} files in {target}")


if __name__ == "__main__":
    if len(sys.argv) < 3:
        sys.exit(__doc__)
    root = Path(sys.argv[1])
    for n in sys.argv[2:]:
        fetch(n, root)
