"""Convert mlxtend's bundled 5000-digit MNIST CSV into a gzipped IDX3 image file.

Usage: python tools/mnist_subset_to_idx.py MNIST_5K_CSV_GZ OUT_IDX_GZ

The CSV (``mlxtend/data/data/mnist_5k.csv.gz``) holds one image per row: 784
pixel values in 0..255 followed by the label. Labels are dropped.
"""

import gzip
import sys

import numpy as np

from mhn_phase.mnist import serialize_idx_images


def main(src, dst):
    with gzip.open(src, "rt") as fh:
        rows = np.loadtxt(fh, delimiter=",")
    pixels = rows[:, :-1].astype(np.uint8).reshape(-1, 28, 28)
    # mtime=0 keeps the archive byte-reproducible
    with open(dst, "wb") as out, gzip.GzipFile(fileobj=out, mode="wb", mtime=0) as gz:
        gz.write(serialize_idx_images(pixels))
    print(f"wrote {pixels.shape[0]} images to {dst}")


if __name__ == "__main__":
    main(*sys.argv[1:3])
