#!/usr/bin/env python3
"""Download and unpack TUDataset benchmarks such as MUTAG or PTC_MR.

Usage:
    python3 scripts/fetch_tudataset.py MUTAG [PTC_MR ...] [--dest data]

Needs network access. Each archive lands under <dest>/<NAME>/ in the
four-file plain-text layout that `dqgnn --dataset-dir <dest>` reads.
"""

import argparse
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

BASE_URL = "https://www.chrsmrrs.com/graphkerneldatasets/{name}.zip"


def fetch(name: str, dest: Path) -> None:
    url = BASE_URL.format(name=name)
    print(f"downloading {url}")
    with urllib.request.urlopen(url, timeout=120) as response:
        payload = response.read()
    with zipfile.ZipFile(io.BytesIO(payload)) as archive:
        archive.extractall(dest)
    print(f"unpacked into {dest / name}")


def main() -> int:
    parser = argparse.ArgumentParser(
        description="fetch TUDataset benchmark archives"
    )
    parser.add_argument("names", nargs="+", help="dataset names, e.g. MUTAG")
    parser.add_argument("--dest", default="data",
                        help="directory to unpack into (default: data)")
    args = parser.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        fetch(name, dest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
