#!/usr/bin/env python3
"""Build local IDX dataset files from the npm data packages.

The npm packages ``mnist`` and ``fashion-mnist`` embed real dataset images
as JSON (no general-purpose network access is needed beyond the npm
registry). This script installs the package into a scratch directory,
decodes the per-class JSON files, and writes gzipped IDX image/label files
under the output directory:

    python scripts/fetch_data.py --dataset mnist --out data
    python scripts/fetch_data.py --dataset fashion-mnist --out data

CIFAR-100 has no npm/pip source; download cifar-100-binary.tar.gz from the
dataset's distribution page on a networked machine and place train.bin at
<out>/cifar100/train.bin (see README).
"""

import argparse
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
from optinv.datasets import write_idx_images, write_idx_labels  # noqa: E402

PACKAGES = {
    "mnist": ("mnist", "src/digits"),
    "fashion-mnist": ("fashion-mnist", "src/clothes"),
}


def decode_class_file(path: Path) -> np.ndarray:
    """Return (count, 28, 28) uint8 images from one per-class JSON file."""
    with open(path) as f:
        data = json.load(f)["data"]
    if data and isinstance(data[0], list):  # nested rows of 0-255 ints
        arr = np.asarray(data, dtype=np.float64)
    else:  # flat stream of [0, 1] floats
        arr = np.asarray(data, dtype=np.float64).reshape(-1, 784)
        arr *= 255.0
    images = np.round(arr).astype(np.uint8).reshape(-1, 28, 28)
    return images


def npm_install(package: str, prefix: Path) -> Path:
    subprocess.run(
        ["npm", "install", "--prefix", str(prefix), package],
        check=True,
        stdout=subprocess.DEVNULL,
    )
    return prefix / "node_modules" / package


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dataset", choices=sorted(PACKAGES), default="mnist")
    parser.add_argument("--out", default="data", help="output directory root")
    parser.add_argument("--seed", type=int, default=0, help="class-interleaving shuffle seed")
    parser.add_argument(
        "--node-modules",
        default=None,
        help="reuse an existing node_modules/<package> instead of npm-installing",
    )
    args = parser.parse_args()

    package, class_dir = PACKAGES[args.dataset]
    out_dir = Path(args.out) / args.dataset
    out_dir.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as scratch:
        if args.node_modules:
            pkg_root = Path(args.node_modules) / package
        else:
            print(f"installing npm package {package!r} ...")
            pkg_root = npm_install(package, Path(scratch))
        all_images = []
        all_labels = []
        for cls in range(10):
            images = decode_class_file(pkg_root / class_dir / f"{cls}.json")
            all_images.append(images)
            all_labels.append(np.full(len(images), cls, dtype=np.uint8))
            print(f"  class {cls}: {len(images)} images")

    images = np.concatenate(all_images)
    labels = np.concatenate(all_labels)
    order = np.random.default_rng(args.seed).permutation(len(images))
    images, labels = images[order], labels[order]

    img_path = out_dir / "images-idx3-ubyte.gz"
    lbl_path = out_dir / "labels-idx1-ubyte.gz"
    write_idx_images(img_path, images)
    write_idx_labels(lbl_path, labels)
    print(f"wrote {len(images)} images -> {img_path}")
    print(f"wrote labels -> {lbl_path}")


if __name__ == "__main__":
    main()
