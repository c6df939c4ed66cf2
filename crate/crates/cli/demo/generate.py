"""Regenerates the demo lap files. Run from this directory."""
import math
import random

BARS = 120
BEATS = [4] * 80 + [3] * 40
RECORDINGS = [
    # label, base BPM, rubato depth, seed, format
    ("halvorsen1936", 132.0, 0.10, 11, "seconds"),
    ("okonkwo1954", 144.0, 0.07, 12, "decimal_days"),
    ("lindqvist1968", 152.0, 0.05, 13, "hms"),
    ("moreau1989", 160.0, 0.06, 14, "semicolon"),
    ("tanaka2007", 168.0, 0.04, 15, "seconds"),
]


def curve(base, depth, seed):
    rng = random.Random(seed)
    out = []
    for bar in range(1, BARS + 1):
        phrase = (bar - 1) % 8
        shape = 1.0 + depth * math.sin(math.pi * phrase / 7.0) - depth * (phrase == 7)
        if 73 <= bar <= 80:
            shape *= 1.0 - 0.03 * (bar - 72)
        bpm = base * shape * (1.0 + rng.gauss(0.0, 0.015))
        out.append(bpm)
    if base == 152.0:
        out[79] *= 0.45
    return out


def hms(t):
    m, s = divmod(t, 60.0)
    return f"{int(m):02d}:{s:06.3f}"


def main():
    for label, base, depth, seed, fmt in RECORDINGS:
        t, rows = 0.0, []
        for bar, bpm in enumerate(curve(base, depth, seed), start=1):
            t += BEATS[bar - 1] * 60.0 / bpm
            rows.append((bar, round(t, 3)))
        with open(f"laps/{label}.csv", "w", newline="\n") as f:
            if fmt == "seconds":
                f.write("bar,cumulative\n")
                f.writelines(f"{b},{v:.3f}\n" for b, v in rows)
            elif fmt == "decimal_days":
                f.write("bar,cumulative_days\n")
                f.writelines(f"{b},{v / 86400.0:.10f}\n" for b, v in rows)
            elif fmt == "hms":
                f.write("bar,elapsed\n")
                f.writelines(f"{b},{hms(v)}\n" for b, v in rows)
            else:
                f.writelines(f"{b};{v:.3f}\n" for b, v in rows)
        print(label, rows[-1][1])


if __name__ == "__main__":
    main()
