"""Generate an approximate WCS chip table (chip, grid code, L*, a*, b*).

The published WCS CIELAB table is not redistributed here. This script rebuilds
the 330-chip stimulus grid from Munsell specifications: rows B-I are Munsell
values 9..2 at the 40 standard hues (2.5R .. 10RP), each at the highest chroma
present in the Munsell renotation "real" set for that hue/value (capped at 16);
column 0 holds the ten achromatic chips N9.5 .. N1.5. Conversion uses
Illuminant C throughout.

Usage: python3 tools/gen_wcs_chips.py > data/wcs_chips_approx.tsv
"""
import sys
import numpy as np
import colour
from colour.notation.datasets.munsell import MUNSELL_COLOURS_REAL

HUE_FAMILIES = ["R", "YR", "Y", "GY", "G", "BG", "B", "PB", "P", "RP"]
HUES = [f"{step}{fam}" for fam in HUE_FAMILIES for step in ("2.5", "5", "7.5", "10")]
ROWS = "ABCDEFGHIJ"
ROW_VALUE = {"A": 9.5, "B": 9, "C": 8, "D": 7, "E": 6, "F": 5, "G": 4, "H": 3, "I": 2, "J": 1.5}
ILL_C = colour.CCS_ILLUMINANTS["CIE 1931 2 Degree Standard Observer"]["C"]


def max_chroma(hue, value):
    best = 0
    for (h, v, c), _ in MUNSELL_COLOURS_REAL:
        if h == hue and abs(v - value) < 1e-9 and c > best:
            best = c
    return min(best, 16)


def lab_of(spec):
    xyY = colour.munsell_colour_to_xyY(spec)
    xyz = colour.xyY_to_XYZ(xyY)
    return colour.XYZ_to_Lab(xyz, ILL_C)


def main():
    out = sys.stdout
    out.write("#chip\tgrid\tL\ta\tb\n")
    chip = 0
    rows = []
    for r in ROWS:
        rows.append((r, 0, f"N{ROW_VALUE[r]}"))
        if r in "BCDEFGHI":
            for col, hue in enumerate(HUES, start=1):
                c = max_chroma(hue, ROW_VALUE[r])
                rows.append((r, col, f"{hue} {ROW_VALUE[r]:g}/{c:g}"))
    for r, col, spec in rows:
        chip += 1
        lab = lab_of(spec) + 0.0
        lab = [0.0 if abs(v) < 0.005 else v for v in lab]
        out.write(f"{chip}\t{r}{col}\t{lab[0]:.2f}\t{lab[1]:.2f}\t{lab[2]:.2f}\n")


if __name__ == "__main__":
    main()
