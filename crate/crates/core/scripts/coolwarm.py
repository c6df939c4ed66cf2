"""Regenerates src/render/coolwarm.rs (Moreland's diverging map)."""
import math

REF = (0.95047, 1.0, 1.08883)


def to_linear(c):
    return c / 12.92 if c <= 0.04045 else ((c + 0.055) / 1.055) ** 2.4


def from_linear(c):
    return 12.92 * c if c <= 0.0031308 else 1.055 * c ** (1 / 2.4) - 0.055


def f(t):
    return t ** (1 / 3) if t > 0.008856 else 7.787 * t + 16 / 116


def finv(t):
    return t ** 3 if t > 0.20689 else (t - 16 / 116) / 7.787


def rgb_to_msh(rgb):
    r, g, b = (to_linear(c / 255) for c in rgb)
    x = 0.4124 * r + 0.3576 * g + 0.1805 * b
    y = 0.2126 * r + 0.7152 * g + 0.0722 * b
    z = 0.0193 * r + 0.1192 * g + 0.9505 * b
    fx, fy, fz = f(x / REF[0]), f(y / REF[1]), f(z / REF[2])
    L, a, bb = 116 * fy - 16, 500 * (fx - fy), 200 * (fy - fz)
    m = math.sqrt(L * L + a * a + bb * bb)
    return m, math.acos(L / m), math.atan2(bb, a)


def msh_to_rgb(msh):
    m, s, h = msh
    L, a, bb = m * math.cos(s), m * math.sin(s) * math.cos(h), m * math.sin(s) * math.sin(h)
    fy = (L + 16) / 116
    x, y, z = REF[0] * finv(fy + a / 500), REF[1] * finv(fy), REF[2] * finv(fy - bb / 200)
    r = 3.2406 * x - 1.5372 * y - 0.4986 * z
    g = -0.9689 * x + 1.8758 * y + 0.0415 * z
    b = 0.0557 * x - 0.2040 * y + 1.0570 * z
    return tuple(min(255, max(0, round(from_linear(min(1, max(0, c))) * 255))) for c in (r, g, b))


def adjust_hue(msh, m_unsat):
    m, s, h = msh
    if m >= m_unsat:
        return h
    spin = s * math.sqrt(m_unsat ** 2 - m ** 2) / (m * math.sin(s))
    return h + spin if h > -math.pi / 3 else h - spin


def interpolate(c1, c2, t):
    m1, s1, h1 = rgb_to_msh(c1)
    m2, s2, h2 = rgb_to_msh(c2)
    if s1 > 0.05 and s2 > 0.05 and abs(h1 - h2) > math.pi / 3:
        mid = max(m1, m2, 88.0)
        if t < 0.5:
            m2, s2, h2 = mid, 0.0, 0.0
            t = 2 * t
        else:
            m1, s1, h1 = mid, 0.0, 0.0
            t = 2 * t - 1
    if s1 < 0.05 and s2 > 0.05:
        h1 = adjust_hue((m2, s2, h2), m1)
    elif s2 < 0.05 and s1 > 0.05:
        h2 = adjust_hue((m1, s1, h1), m2)
    return msh_to_rgb(((1 - t) * m1 + t * m2, (1 - t) * s1 + t * s2, (1 - t) * h1 + t * h2))


def main():
    cool, warm = (59, 76, 192), (180, 4, 38)
    rows = [interpolate(cool, warm, i / 255) for i in range(256)]
    out = ["// Generated by scripts/coolwarm.py. Do not edit.", "",
           "pub(super) const COOLWARM: [[u8; 3]; 256] = ["]
    out += [f"    [{r}, {g}, {b}]," for r, g, b in rows]
    out.append("];")
    print("\n".join(out))


if __name__ == "__main__":
    main()
