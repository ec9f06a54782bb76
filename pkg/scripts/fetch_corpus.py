#!/usr/bin/env python3
"""Fetch the public-domain desk corpora used by the corpus tests.

Sources (npm tarballs, pinned):
  @stdlib/datasets-sotu 0.2.3        US State of the Union addresses 1790-2021
                                     (US government works; data CC0)
  @stdlib/datasets-moby-dick 0.2.3   Moby Dick, Herman Melville (public domain)

Writes gzipped UTF-8 text, one document per line:
  data/moby_dick.txt.gz   one paragraph per line (~1.2 MB)
  data/corpus.txt.gz      every address, then every Moby Dick paragraph (~12 MB)

Needs ``npm`` on PATH.
"""

import argparse
import gzip
import re
import subprocess
import tarfile
import tempfile
from pathlib import Path

PACKAGES = ["@stdlib/datasets-sotu@0.2.3", "@stdlib/datasets-moby-dick@0.2.3"]


def _paragraphs(text):
    for para in re.split(r"\n\s*\n", text.replace("\r\n", "\n")):
        para = " ".join(para.split())
        if para:
            yield para


def fetch(tmp: Path) -> dict[str, Path]:
    subprocess.run(["npm", "pack", "--silent", *PACKAGES], cwd=tmp, check=True, stdout=subprocess.DEVNULL)
    out = {}
    for tgz in sorted(tmp.glob("*.tgz")):
        dest = tmp / tgz.stem
        with tarfile.open(tgz) as tf:
            tf.extractall(dest)
        out["sotu" if "sotu" in tgz.name else "moby"] = dest / "package" / "data"
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out-dir", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        src = fetch(Path(tmp))
        moby = list(_paragraphs((src["moby"] / "data.txt").read_text(encoding="utf-8")))
        addresses = [" ".join(p.read_text(encoding="utf-8").split()) for p in sorted(src["sotu"].glob("*.txt"))]

    # mtime=0 keeps the gzip bytes reproducible
    for name, lines in [("moby_dick.txt.gz", moby), ("corpus.txt.gz", addresses + moby)]:
        with open(out_dir / name, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as fh:
            for line in lines:
                fh.write(line.encode("utf-8") + b"\n")
        size = sum(len(line.encode("utf-8")) + 1 for line in lines)
        print(f"{out_dir / name}: {len(lines)} documents, {size / 1e6:.2f} MB uncompressed")


if __name__ == "__main__":
    main()
