#!/usr/bin/env python3
# Independent PNG fixtures written with a plain zlib/struct encoder (no
# libpng).
#   make_png_fixture.py gray16 OUT.png   16-bit grayscale 3x2
#   make_png_fixture.py sidecar OUT_DIR  16-bit R,G,B,NIR 4x4 sidecar directory
import json
import os
import struct
import sys
import zlib


def chunk(tag, data):
    c = struct.pack(">I", len(data)) + tag + data
    return c + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)


def gray16(path, w, h, samples):
    raw = b""
    for y in range(h):
        raw += b"\x00" + b"".join(struct.pack(">H", v) for v in samples[y * w:(y + 1) * w])
    png = b"\x89PNG\r\n\x1a\n"
    png += chunk(b"IHDR", struct.pack(">IIBBBBB", w, h, 16, 0, 0, 0, 0))
    png += chunk(b"IDAT", zlib.compress(raw, 9))
    png += chunk(b"IEND", b"")
    with open(path, "wb") as f:
        f.write(png)


def sidecar_sample(c, x, y):
    return (c * 13 + y * 4 + x) * 1021


if sys.argv[1] == "gray16":
    gray16(sys.argv[2], 3, 2, [0, 1, 256, 4660, 65534, 65535])
elif sys.argv[1] == "sidecar":
    out = sys.argv[2]
    os.makedirs(out, exist_ok=True)
    channels = []
    for c, name in enumerate(["R", "G", "B", "NIR"]):
        gray16(os.path.join(out, name + ".png"), 4, 4,
               [sidecar_sample(c, x, y) for y in range(4) for x in range(4)])
        channels.append({"name": name, "file": name + ".png"})
    doc = {"width": 4, "height": 4, "bit_depth": 16, "channels": channels}
    with open(os.path.join(out, "channels.json"), "w") as f:
        f.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
