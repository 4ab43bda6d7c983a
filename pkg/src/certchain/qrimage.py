"""Minimal QR code rasterizer for payload strings.

Byte-mode QR at error-correction level M, versions 1-6 (payload text is 79
characters, which fits version 5).  Implements the standard pipeline: bit
stream with pad codewords, Reed-Solomon error correction over GF(256),
block interleaving, function patterns, and penalty-scored mask selection.
PNG output goes through Pillow when installed.
"""

from __future__ import annotations

from pathlib import Path

# Byte-mode character capacity and (ec codewords per block, list of block
# data sizes) at level M, versions 1..6.
_CAPACITY_M = {1: 14, 2: 26, 3: 42, 4: 62, 5: 84, 6: 106}
_EC_BLOCKS_M = {
    1: (10, [16]),
    2: (16, [28]),
    3: (26, [44]),
    4: (18, [32, 32]),
    5: (24, [43, 43]),
    6: (16, [27, 27, 27, 27]),
}

_MASKS = (
    lambda x, y: (x + y) % 2 == 0,
    lambda x, y: y % 2 == 0,
    lambda x, y: x % 3 == 0,
    lambda x, y: (x + y) % 3 == 0,
    lambda x, y: (x // 3 + y // 2) % 2 == 0,
    lambda x, y: x * y % 2 + x * y % 3 == 0,
    lambda x, y: (x * y % 2 + x * y % 3) % 2 == 0,
    lambda x, y: ((x + y) % 2 + x * y % 3) % 2 == 0,
)

_EXP = [0] * 512
_LOG = [0] * 256
_value = 1
for _i in range(255):
    _EXP[_i] = _value
    _LOG[_value] = _i
    _value <<= 1
    if _value & 0x100:
        _value ^= 0x11D
for _i in range(255, 512):
    _EXP[_i] = _EXP[_i - 255]


def _rs_generator(degree: int) -> list[int]:
    # Coefficients highest degree first; product of (x - alpha^i), i < degree.
    poly = [1]
    for i in range(degree):
        next_poly = [0] * (len(poly) + 1)
        for j, coef in enumerate(poly):
            next_poly[j] ^= coef
            if coef:
                next_poly[j + 1] ^= _EXP[(_LOG[coef] + i) % 255]
        poly = next_poly
    return poly


def _rs_remainder(data: list[int], generator: list[int]) -> list[int]:
    remainder = [0] * (len(generator) - 1)
    for byte in data:
        factor = byte ^ remainder[0]
        remainder = remainder[1:] + [0]
        if factor:
            for i in range(len(remainder)):
                g = generator[i + 1]
                if g:
                    remainder[i] ^= _EXP[_LOG[g] + _LOG[factor]]
    return remainder


def _build_codewords(payload: bytes, version: int) -> list[int]:
    ec_per_block, block_sizes = _EC_BLOCKS_M[version]
    data_capacity = sum(block_sizes)
    bits: list[int] = []

    def put(value: int, width: int) -> None:
        for shift in range(width - 1, -1, -1):
            bits.append((value >> shift) & 1)

    put(0b0100, 4)
    put(len(payload), 8)
    for byte in payload:
        put(byte, 8)
    put(0, min(4, data_capacity * 8 - len(bits)))
    while len(bits) % 8:
        bits.append(0)
    codewords = [
        int("".join(map(str, bits[i : i + 8])), 2) for i in range(0, len(bits), 8)
    ]
    next_pad = 0
    while len(codewords) < data_capacity:
        codewords.append((0xEC, 0x11)[next_pad])
        next_pad ^= 1

    blocks: list[list[int]] = []
    offset = 0
    for size in block_sizes:
        blocks.append(codewords[offset : offset + size])
        offset += size
    generator = _rs_generator(ec_per_block)
    ec_blocks = [_rs_remainder(block, generator) for block in blocks]

    interleaved: list[int] = []
    for i in range(max(block_sizes)):
        for block in blocks:
            if i < len(block):
                interleaved.append(block[i])
    for i in range(ec_per_block):
        for ec in ec_blocks:
            interleaved.append(ec[i])
    return interleaved


class _Matrix:
    def __init__(self, version: int):
        self.version = version
        self.size = 17 + 4 * version
        self.modules = [[False] * self.size for _ in range(self.size)]
        self.is_function = [[False] * self.size for _ in range(self.size)]
        self._draw_function_patterns()

    def _set(self, x: int, y: int, dark: bool) -> None:
        self.modules[y][x] = dark
        self.is_function[y][x] = True

    def _draw_finder(self, cx: int, cy: int) -> None:
        for dy in range(-4, 5):
            for dx in range(-4, 5):
                x, y = cx + dx, cy + dy
                if 0 <= x < self.size and 0 <= y < self.size:
                    dist = max(abs(dx), abs(dy))
                    self._set(x, y, dist not in (2, 4))

    def _draw_alignment(self, cx: int, cy: int) -> None:
        for dy in range(-2, 3):
            for dx in range(-2, 3):
                self._set(cx + dx, cy + dy, max(abs(dx), abs(dy)) != 1)

    def _draw_function_patterns(self) -> None:
        for i in range(self.size):
            if not self.is_function[6][i]:
                self._set(i, 6, i % 2 == 0)
            if not self.is_function[i][6]:
                self._set(6, i, i % 2 == 0)
        self._draw_finder(3, 3)
        self._draw_finder(self.size - 4, 3)
        self._draw_finder(3, self.size - 4)
        if self.version >= 2:
            center = 4 * self.version + 10
            self._draw_alignment(center, center)
        # Reserve both format-information areas (content drawn post-mask).
        for i in range(9):
            if not self.is_function[i][8]:
                self._set(8, i, False)
            if not self.is_function[8][i]:
                self._set(i, 8, False)
        for i in range(8):
            self._set(self.size - 1 - i, 8, False)
            self._set(8, self.size - 1 - i, False)
        self._set(8, self.size - 8, True)  # dark module

    def place_data(self, codewords: list[int]) -> None:
        bit_index = 0
        total_bits = len(codewords) * 8
        right = self.size - 1
        while right >= 1:
            if right == 6:
                right = 5
            for vert in range(self.size):
                for j in range(2):
                    x = right - j
                    upward = (right + 1) & 2 == 0
                    y = self.size - 1 - vert if upward else vert
                    if not self.is_function[y][x] and bit_index < total_bits:
                        byte = codewords[bit_index >> 3]
                        self.modules[y][x] = bool((byte >> (7 - (bit_index & 7))) & 1)
                        bit_index += 1
            right -= 2

    def apply_mask(self, mask: int) -> None:
        pattern = _MASKS[mask]
        for y in range(self.size):
            for x in range(self.size):
                if not self.is_function[y][x] and pattern(x, y):
                    self.modules[y][x] = not self.modules[y][x]

    def draw_format_bits(self, mask: int) -> None:
        data = (0b00 << 3) | mask  # EC level M
        rem = data
        for _ in range(10):
            rem = (rem << 1) ^ ((rem >> 9) * 0x537)
        bits = ((data << 10) | rem) ^ 0x5412

        def bit(i: int) -> bool:
            return bool((bits >> i) & 1)

        for i in range(6):
            self._set(8, i, bit(i))
        self._set(8, 7, bit(6))
        self._set(8, 8, bit(7))
        self._set(7, 8, bit(8))
        for i in range(9, 15):
            self._set(14 - i, 8, bit(i))
        for i in range(8):
            self._set(self.size - 1 - i, 8, bit(i))
        for i in range(8, 15):
            self._set(8, self.size - 15 + i, bit(i))
        self._set(8, self.size - 8, True)

    def penalty(self) -> int:
        size = self.size
        score = 0
        lines = [self.modules[y] for y in range(size)]
        lines += [[self.modules[y][x] for y in range(size)] for x in range(size)]
        for line in lines:
            run_color = line[0]
            run_len = 1
            for value in line[1:]:
                if value == run_color:
                    run_len += 1
                else:
                    if run_len >= 5:
                        score += 3 + run_len - 5
                    run_color, run_len = value, 1
            if run_len >= 5:
                score += 3 + run_len - 5
            for i in range(len(line) - 10):
                window = line[i : i + 11]
                if window == [True, False, True, True, True, False, True] + [False] * 4:
                    score += 40
                if window == [False] * 4 + [True, False, True, True, True, False, True]:
                    score += 40
        for y in range(size - 1):
            for x in range(size - 1):
                v = self.modules[y][x]
                if v == self.modules[y][x + 1] == self.modules[y + 1][x] == self.modules[y + 1][x + 1]:
                    score += 3
        dark = sum(sum(row) for row in self.modules)
        percent = dark * 100 / (size * size)
        score += 10 * int(abs(percent - 50) / 5)
        return score


def qr_matrix(text: str) -> list[list[bool]]:
    """Encode `text` as a QR module matrix (True = dark)."""
    payload = text.encode("utf-8")
    for version, capacity in sorted(_CAPACITY_M.items()):
        if len(payload) <= capacity:
            break
    else:
        raise ValueError(f"payload too long for supported QR versions: {len(payload)}")
    codewords = _build_codewords(payload, version)

    best: list[list[bool]] | None = None
    best_penalty = None
    for mask in range(8):
        matrix = _Matrix(version)
        matrix.place_data(codewords)
        matrix.apply_mask(mask)
        matrix.draw_format_bits(mask)
        penalty = matrix.penalty()
        if best_penalty is None or penalty < best_penalty:
            best, best_penalty = matrix.modules, penalty
    assert best is not None
    return best


def write_png(text: str, path: Path, scale: int = 8, border: int = 4) -> None:
    """Render `text` as a QR PNG with a quiet zone (requires Pillow)."""
    try:
        from PIL import Image
    except ImportError:
        raise RuntimeError("PNG output requires Pillow (pip install certchain[qr])") from None
    matrix = qr_matrix(text)
    size = len(matrix)
    dim = (size + 2 * border) * scale
    image = Image.new("L", (dim, dim), 255)
    pixels = image.load()
    for y in range(size):
        for x in range(size):
            if matrix[y][x]:
                for dy in range(scale):
                    for dx in range(scale):
                        pixels[(x + border) * scale + dx, (y + border) * scale + dy] = 0
    image.save(path, format="PNG")
