#!/usr/bin/env python3
"""Generate the bundled three-constellation evaluation dataset.

Writes synthetic Walker-style element sets and ground networks for three
LEO constellations of contrasting size and inclination, loosely patterned
on public mega-constellation geometries, plus the scenario file that ties
them together. Fully deterministic: fixed epoch, no randomness.

Usage: python3 tools/gen_triple.py
"""

import math
from pathlib import Path

EPOCH_YY = 26
EPOCH_DOY = 234  # 2026-08-22
SPAN_START = "2026-08-22T00:00:00Z"
SPAN_END = "2026-08-22T10:00:00Z"
ALPHA_S = 1
MIN_ELEVATION_DEG = 25.0

OUT = Path(__file__).resolve().parent.parent / "data" / "triple"


def checksum(line):
    total = 0
    for c in line[:68]:
        if c.isdigit():
            total += int(c)
        elif c == "-":
            total += 1
    return total % 10


def assumed_decimal(value):
    """Encode a float in TLE assumed-decimal-point notation (8 columns)."""
    if value == 0.0:
        return " 00000-0"
    sign = "-" if value < 0 else " "
    exp = math.floor(math.log10(abs(value))) + 1
    mant = round(abs(value) / 10.0 ** exp * 1e5)
    if mant == 100000:
        mant = 10000
        exp += 1
    return f"{sign}{mant:05d}{exp:+d}"


def tle(name, cat, inc, raan, ecc, argp, ma, mm, ndot=0.0, nddot=0.0, bstar=0.0):
    ndot_sign = "-" if ndot < 0 else " "
    ndot_body = f"{abs(ndot):.8f}".lstrip("0")
    line1 = (
        f"1 {cat:05d}U          {EPOCH_YY:02d}{EPOCH_DOY:03d}.00000000 "
        f"{ndot_sign}{ndot_body} {assumed_decimal(nddot)} {assumed_decimal(bstar)} 0  999"
    )
    line2 = (
        f"2 {cat:05d} {inc:8.4f} {raan % 360.0:8.4f} {round(ecc * 1e7):07d} "
        f"{argp % 360.0:8.4f} {ma % 360.0:8.4f} {mm:11.8f}    0"
    )
    assert len(line1) == 68, (len(line1), line1)
    assert len(line2) == 68, (len(line2), line2)
    return f"{name}\n{line1}{checksum(line1)}\n{line2}{checksum(line2)}\n"


def walker(prefix, cat0, planes, per_plane, inc, mm, raan_spacing, phase_deg,
           ecc=2e-4, bstar=1e-4):
    """Evenly phased multi-plane shell, one title line per satellite."""
    blocks = []
    cat = cat0
    for p in range(planes):
        for s in range(per_plane):
            name = f"{prefix}-{p * per_plane + s + 1:02d}"
            raan = p * raan_spacing
            ma = s * (360.0 / per_plane) + p * phase_deg
            blocks.append(
                tle(name, cat, inc, raan, ecc, 0.0, ma, mm, ndot=1.2e-7, bstar=bstar)
            )
            cat += 1
    return "".join(blocks)


def stations_csv(constellation, rows):
    lines = ["id,lat_deg,lon_deg,alt_m,constellation"]
    for sid, lat, lon, alt in rows:
        lines.append(f"{sid},{lat},{lon},{alt},{constellation}")
    return "\n".join(lines) + "\n"


# Polar shell, ~1200 km: 30 satellites in 3 planes, 10 mid-latitude gateways.
ONEWEB_TLES = walker("OW", 90001, planes=5, per_plane=6, inc=87.9, mm=13.16,
                     raan_spacing=36.0, phase_deg=12.0)
ONEWEB_STATIONS = [
    ("ow-alice-springs", -23.70, 133.88, 600),
    ("ow-johannesburg", -26.20, 28.05, 1750),
    ("ow-antofagasta", -23.65, -70.40, 40),
    ("ow-hilo", 19.71, -155.08, 20),
    ("ow-mumbai", 19.08, 72.88, 14),
    ("ow-hanoi", 21.03, 105.85, 12),
    ("ow-havana", 23.11, -82.37, 59),
    ("ow-riyadh", 24.71, 46.68, 612),
    ("ow-asuncion", -25.28, -57.63, 43),
    ("ow-windhoek", -22.56, 17.08, 1700),
]

# Inclined shell, ~490 km: 50 satellites in 5 planes, 20 gateways kept
# below the ground-track density bulge.
STARLINK_TLES = walker("SL", 91001, planes=10, per_plane=5, inc=53.0, mm=15.55,
                       raan_spacing=18.0, phase_deg=3.6)
STARLINK_STATIONS = [
    ("sl-atlanta", 33.75, -84.39, 320),
    ("sl-dallas", 32.78, -96.80, 130),
    ("sl-phoenix", 33.45, -112.07, 331),
    ("sl-los-angeles", 34.05, -118.24, 71),
    ("sl-casablanca", 33.57, -7.59, 50),
    ("sl-copenhagen", 55.68, 12.57, 24),
    ("sl-osaka", 34.69, 135.50, 12),
    ("sl-shanghai", 31.23, 121.47, 4),
    ("sl-santiago", -33.45, -70.67, 520),
    ("sl-buenos-aires", -34.60, -58.38, 25),
    ("sl-sydney", -33.87, 151.21, 58),
    ("sl-cape-town", -33.92, 18.42, 25),
    ("sl-perth", -31.95, 115.86, 20),
    ("sl-durban", -29.86, 31.02, 8),
    ("sl-lima", -12.05, -77.04, 154),
    ("sl-nairobi", -1.29, 36.82, 1795),
    ("sl-singapore", 1.35, 103.82, 15),
    ("sl-honolulu", 21.31, -157.86, 18),
    ("sl-brisbane", -27.47, 153.03, 27),
    ("sl-new-delhi", 28.61, 77.21, 216),
]

# Near-polar shell, ~970 km: 20 satellites in 5 planes, 4 equatorial gateways.
IRIDIUM_TLES = walker("IR", 92001, planes=5, per_plane=4, inc=86.4, mm=13.80,
                      raan_spacing=36.0, phase_deg=18.0)
IRIDIUM_STATIONS = [
    ("ir-quito", -0.18, -78.47, 2850),
    ("ir-libreville", 0.39, 9.45, 15),
    ("ir-singapore", 1.35, 103.82, 15),
    ("ir-tarawa", 1.45, 172.98, 3),
]

SCENARIO = f"""# Three-constellation evaluation scenario (synthetic, deterministic).
# Regenerate with: python3 tools/gen_triple.py
span_start = "{SPAN_START}"
span_end = "{SPAN_END}"
alpha_s = {ALPHA_S}
min_elevation_deg = {MIN_ELEVATION_DEG}

[[constellations]]
id = "oneweb"
stations = "oneweb_stations.csv"
tles = "oneweb.tle"

[[constellations]]
id = "starlink"
stations = "starlink_stations.csv"
tles = "starlink.tle"

[[constellations]]
id = "iridium"
stations = "iridium_stations.csv"
tles = "iridium.tle"
"""


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "scenario.toml").write_text(SCENARIO)
    (OUT / "oneweb.tle").write_text(ONEWEB_TLES)
    (OUT / "oneweb_stations.csv").write_text(stations_csv("oneweb", ONEWEB_STATIONS))
    (OUT / "starlink.tle").write_text(STARLINK_TLES)
    (OUT / "starlink_stations.csv").write_text(stations_csv("starlink", STARLINK_STATIONS))
    (OUT / "iridium.tle").write_text(IRIDIUM_TLES)
    (OUT / "iridium_stations.csv").write_text(stations_csv("iridium", IRIDIUM_STATIONS))
    print(f"wrote dataset to {OUT}")


if __name__ == "__main__":
    main()
