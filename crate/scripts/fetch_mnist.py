#!/usr/bin/env python3
"""Write an MNIST IDX image file from the 5,000-image subset shipped in the
mlxtend wheel. Only used when the full MNIST files are not reachable.

    python3 scripts/fetch_mnist.py [out_dir]
"""
import csv
import gzip
import io
import struct
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def fetch_wheel(tmp):
    subprocess.run(
        [sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary=:all:",
         "-d", tmp, "mlxtend==0.24.0"],
        check=True,
    )
    return next(Path(tmp).glob("mlxtend-*.whl"))


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "data/mnist")
    out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        with zipfile.ZipFile(fetch_wheel(tmp)) as wheel:
            raw = gzip.decompress(wheel.read(MEMBER))
    rows = [list(map(int, r)) for r in csv.reader(io.StringIO(raw.decode()))]
    pixels = bytes(v for r in rows for v in r[:784])
    labels = bytes(r[784] for r in rows)
    n = len(rows)
    (out / "images-idx3-ubyte").write_bytes(struct.pack(">IIII", 0x803, n, 28, 28) + pixels)
    (out / "labels-idx1-ubyte").write_bytes(struct.pack(">II", 0x801, n) + labels)
    print(f"wrote {n} images to {out}")


if __name__ == "__main__":
    main()
