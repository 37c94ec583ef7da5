#!/usr/bin/env python3
# High-precision references for radiometric scalar maps.
from mpmath import mp, mpf

mp.dps = 50
print("gamma 2.2 @128:", mpf(255) * (mpf(128) / 255) ** (1 / mpf("2.2")))
for v in (32768, 257, 65535):
    print("rescale", v, mpf(v) * 255 / 65535)
