#!/usr/bin/env python3
"""Independent oracle for the golden constants frozen into the C++ tests.

Nothing here imports or calls the C++ library. Run it to regenerate the
values pasted into tests/unit/*.cpp:

    python3 tests/oracles/gen_golden.py
"""
import math

import numpy as np

MASK = (1 << 64) - 1


class Xorshift64Star:
    def __init__(self, seed):
        self.state = seed & MASK or 0x9E3779B97F4A7C15

    def next(self):
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK


def fnv1a64(text):
    h = 0xCBF29CE484222325
    for b in text.encode():
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


def gabor(size, wavelength, theta, psi, sigma, gamma):
    half = (size - 1) // 2
    k = np.zeros((size, size))
    for r in range(size):
        for c in range(size):
            x, y = c - half, r - half
            xp = x * math.cos(theta) + y * math.sin(theta)
            yp = -x * math.sin(theta) + y * math.cos(theta)
            k[r, c] = math.exp(-(xp * xp + gamma * gamma * yp * yp) / (2 * sigma * sigma)) * math.cos(
                2 * math.pi * xp / wavelength + psi)
    return k


def convolve_replicate(img, k):
    h, w = img.shape
    size = k.shape[0]
    half = (size - 1) // 2
    out = np.zeros((h, w))
    for r in range(h):
        for c in range(w):
            acc = 0.0
            for i in range(size):
                for j in range(size):
                    rr = min(max(r - (i - half), 0), h - 1)
                    cc = min(max(c - (j - half), 0), w - 1)
                    acc += k[i, j] * img[rr, cc]
            out[r, c] = acc
    return out


def bilinear_scalar(src, dst_w, dst_h):
    sh, sw = len(src), len(src[0])
    out = []
    for ty in range(dst_h):
        row = []
        sy = min(max((ty + 0.5) * sh / dst_h - 0.5, 0.0), sh - 1)
        for tx in range(dst_w):
            sx = min(max((tx + 0.5) * sw / dst_w - 0.5, 0.0), sw - 1)
            x0, y0 = int(math.floor(sx)), int(math.floor(sy))
            x1, y1 = min(x0 + 1, sw - 1), min(y0 + 1, sh - 1)
            fx, fy = sx - x0, sy - y0
            top = src[y0][x0] * (1 - fx) + src[y0][x1] * fx
            bot = src[y1][x0] * (1 - fx) + src[y1][x1] * fx
            row.append(int(math.floor(top * (1 - fy) + bot * fy + 0.5)))
        out.append(row)
    return out


def rle_encode(data):
    out = bytearray()
    i = 0
    while i < len(data):
        j = i
        while j < len(data) and data[j] == data[i] and j - i < 255:
            j += 1
        run = j - i
        if run >= 4:
            out += bytes([0xFE, run, data[i]])
            i = j
        else:
            out += b"\xfe\x00" if data[i] == 0xFE else bytes([data[i]])
            i += 1
    return bytes(out)


def keystream(key, n, rotate):
    rng = Xorshift64Star(int.from_bytes(key, "little"))
    out = bytearray()
    while len(out) < n:
        out += rng.next().to_bytes(8, "little")
    out = out[:n]
    if rotate:
        out = bytearray(((b << 3) | (b >> 5)) & 0xFF for b in out)
    return bytes(out)


def toy_pack(payload, variant, key):
    body = payload if variant == "A" else rle_encode(payload)
    ks = keystream(key, len(body), variant == "C")
    header = b"TPK" + variant.encode() + b"\x00" + bytes([" ABC".index(variant)])
    header += len(payload).to_bytes(8, "little") + key
    return header + bytes(a ^ b for a, b in zip(body, ks))


def png_fixtures():
    import io

    from PIL import Image

    def dump(img):
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue().hex()

    gray = Image.frombytes("L", (3, 2), bytes([10, 20, 30, 40, 50, 60]))
    rgb = Image.new("RGB", (2, 2), (200, 100, 50))
    gray16 = Image.new("I;16", (2, 2), 1000)
    return {"gray 3x2": dump(gray), "rgb 2x2": dump(rgb), "gray16 2x2": dump(gray16)}


def main():
    rng = Xorshift64Star(1)
    print("xorshift64*(seed=1) first outputs:", [hex(rng.next()) for _ in range(4)])
    print("fnv1a64('split') =", hex(fnv1a64("split")))

    print("kernel(lambda=10,theta=0,x=2,y=0) = %.17g" % (math.exp(-4 / 18) * math.cos(0.4 * math.pi)))
    k = gabor(9, 10.0, 0.0, 0.0, 3.0, 0.5)
    print("  from full kernel = %.17g" % k[4, 6])

    ramp = [[r * 64 + c * 16 for c in range(4)] for r in range(4)]
    print("bilinear 4x4 ramp -> 2x2:", bilinear_scalar(ramp, 2, 2))
    print("bilinear 4x4 ramp -> 3x3:", bilinear_scalar(ramp, 3, 3))

    # Gabor jet of a seeded 64x64 image; pixel = top byte of each draw.
    rng = Xorshift64Star(20240601)
    img = np.array([rng.next() >> 56 for _ in range(64 * 64)], dtype=float).reshape(64, 64)
    jet = []
    for f in (0.1, 0.2, 0.3):
        for theta in (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4):
            resp = convolve_replicate(img, gabor(9, 1.0 / f, theta, 0.0, 3.0, 0.5))
            mean = resp.sum() / resp.size
            var = ((resp - mean) ** 2).sum() / resp.size
            jet += [mean, var]
    payload = b"AAAAAAAB\xfeXYZ"
    key = bytes(range(1, 9))
    for v in "ABC":
        print("toy_pack(%r, %s, key=01..08) = %s" % (payload, v, toy_pack(payload, v, key).hex()))

    for name, hexdata in png_fixtures().items():
        print("png %s: %s" % (name, hexdata))

    print("golden jet (seed 20240601):")
    for i in range(0, 24, 2):
        print("    %.17g, %.17g," % (jet[i], jet[i + 1]))


if __name__ == "__main__":
    main()
