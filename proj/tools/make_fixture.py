#!/usr/bin/env python3
"""Generates the bundled synthetic fixture under tests/fixtures/.

Layout: 8 community-area-like rectangles (4 x 2 grid) split into 20
census-tract-like strips, 40 schools, one road (line) layer and one facility
(point) layer. Expected per-school values are computed here independently of
the C++ engine, at 40 significant digits with mpmath:

  * PSS as an exact fraction neighborhood / total,
  * road kilometers by analytic segment/disc intersection in the local
    equirectangular frame of each school,
  * facility counts by haversine distance,
  * zone membership by exact rectangle tests.

The seed search keeps the first layout whose natural-breaks (k = 4) top class
holds only zones whose schools are at least 58% Latinx and whose tract-level
top-class share is at least the community-area one.
"""

import csv
import itertools
import json
import os
import random
import sys
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 40

R = mp.mpf("6371008.8")
MILE = mp.mpf("1609.344")
DEG = mp.pi / 180

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "fixtures")

LON0, LAT0 = -87.74, 41.78
CA_W, CA_H = 0.04, 0.04
CA_NAMES = {
    "01": "Brighton Flats", "02": "New City", "03": "Canal Row", "04": "Lakeside",
    "05": "Pilsen Yards", "06": "North Grove", "07": "Elm Park", "08": "Harbor Point",
}
CT_SPLITS = {"01": 3, "02": 3, "03": 3, "04": 3, "05": 2, "06": 2, "07": 2, "08": 2}
SCHOOLS_PER_CA = {"01": 6, "02": 10, "03": 6, "04": 4, "05": 6, "06": 4, "07": 3, "08": 0}
HIGH_LATINX = {"01", "02", "05"}
RESIDENT_LATINX = {"01": 0.71, "02": 0.83, "03": 0.28, "04": 0.12,
                   "05": 0.77, "06": 0.21, "07": 0.09, "08": 0.15}

ROADS = [
    ("r1", "Pershing Industrial", [(-87.745, 41.800), (-87.700, 41.7995), (-87.655, 41.8005)]),
    ("r2", "Western Haul", [(-87.718, 41.775), (-87.7175, 41.812), (-87.7185, 41.838)]),
    ("r3", "Stockyard Spur", [(-87.705, 41.785), (-87.690, 41.803), (-87.672, 41.816)]),
    ("r4", "Canal Service", [(-87.735, 41.826), (-87.712, 41.829), (-87.690, 41.8285)]),
    ("r5", "Harbor Freight", [(-87.605, 41.845), (-87.585, 41.852)]),
    ("r7", "Outer Belt", [(-87.80, 41.70), (-87.76, 41.70)]),
]
# A MultiLineString feature with two parts.
ROAD_MULTI = ("r6", "Ashland Yard", [[(-87.6935, 41.7935), (-87.6860, 41.7940)],
                                      [(-87.6840, 41.7880), (-87.6840, 41.7960)]])


def ca_rect(ca):
    i = int(ca) - 1
    col, row = i % 4, i // 4
    lon_min = round(LON0 + col * CA_W, 6)
    lat_min = round(LAT0 + row * CA_H, 6)
    return lon_min, lat_min, round(lon_min + CA_W, 6), round(lat_min + CA_H, 6)


def ct_rects(ca):
    lon_min, lat_min, lon_max, lat_max = ca_rect(ca)
    n = CT_SPLITS[ca]
    edges = [round(lon_min + (lon_max - lon_min) * j / n, 6) for j in range(n + 1)]
    return [(f"{ca}{j + 1:02d}", (edges[j], lat_min, edges[j + 1], lat_max)) for j in range(n)]


def rect_ring(r):
    a, b, c, d = r
    return [[a, b], [c, b], [c, d], [a, d], [a, b]]


def inside(r, lon, lat):
    return r[0] <= lon <= r[2] and r[1] <= lat <= r[3]


def haversine(a, b):
    lat1, lat2 = mp.mpf(a[1]) * DEG, mp.mpf(b[1]) * DEG
    dlat = (mp.mpf(b[1]) - mp.mpf(a[1])) * DEG
    dlon = (mp.mpf(b[0]) - mp.mpf(a[0])) * DEG
    h = mp.sin(dlat / 2) ** 2 + mp.cos(lat1) * mp.cos(lat2) * mp.sin(dlon / 2) ** 2
    return 2 * R * mp.asin(mp.sqrt(h))


def project(o, p):
    return (R * (mp.mpf(p[0]) - mp.mpf(o[0])) * mp.cos(mp.mpf(o[1]) * DEG) * DEG,
            R * (mp.mpf(p[1]) - mp.mpf(o[1])) * DEG)


def seg_in_disc(a, b, r):
    dx, dy = b[0] - a[0], b[1] - a[1]
    A = dx * dx + dy * dy
    if A == 0:
        return mp.mpf(0)
    B = 2 * (a[0] * dx + a[1] * dy)
    C = a[0] ** 2 + a[1] ** 2 - r * r
    disc = B * B - 4 * A * C
    if disc <= 0:
        return mp.mpf(0)
    s = mp.sqrt(disc)
    t0 = max(mp.mpf(0), (-B - s) / (2 * A))
    t1 = min(mp.mpf(1), (-B + s) / (2 * A))
    return (t1 - t0) * mp.sqrt(A) if t1 > t0 else mp.mpf(0)


def road_parts():
    parts = [coords for _, _, coords in ROADS]
    parts += ROAD_MULTI[2]
    return parts


def road_km(school):
    total = mp.mpf(0)
    for coords in road_parts():
        pts = [project(school, p) for p in coords]
        for a, b in zip(pts, pts[1:]):
            total += seg_in_disc(a, b, MILE)
    return total / 1000


def jenks_bruteforce(values, k):
    xs = sorted(values)
    n = len(xs)
    best = None
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        cost = Fraction(0)
        for lo, hi in zip(bounds, bounds[1:]):
            grp = [Fraction(x) for x in xs[lo:hi]]
            m = sum(grp) / len(grp)
            cost += sum((g - m) ** 2 for g in grp)
        if best is None or cost < best[0]:
            best = (cost, cuts)
    return [xs[c - 1] for c in best[1]]


def classify(v, breaks):
    for j, b in enumerate(breaks):
        if v <= b:
            return j
    return len(breaks)


def build(seed):
    rng = random.Random(seed)
    schools = []
    n = 0
    for ca in sorted(SCHOOLS_PER_CA):
        cts = ct_rects(ca)
        for _ in range(SCHOOLS_PER_CA[ca]):
            n += 1
            ct_id, r = cts[rng.randrange(len(cts))]
            lon = round(rng.uniform(r[0] + 0.002, r[2] - 0.002), 6)
            lat = round(rng.uniform(r[1] + 0.002, r[3] - 0.002), 6)
            total = rng.randrange(200, 900)
            nbhd = int(total * rng.uniform(0.3, 0.95))
            lat_share = rng.uniform(0.62, 0.95) if ca in HIGH_LATINX else rng.uniform(0.05, 0.45)
            schools.append(dict(id=f"S{n:03d}", name=f"School {n:03d}", lon=lon, lat=lat,
                                total=total, nbhd=nbhd, latinx=round(lat_share, 3)))
    # Special cases.
    schools[1]["nbhd"] = 0                      # zero-PSS school in CA 01
    zero = next(s for s in schools if s["lon"] >= ca_rect("04")[0] and s["lat"] < 41.82)
    zero["total"], zero["nbhd"] = 0, 0          # zero enrollment, excluded
    n += 1
    schools.append(dict(id=f"S{n:03d}", name=f"School {n:03d}", lon=-87.52, lat=41.70,
                        total=450, nbhd=300, latinx=0.4))  # outside every zone
    return schools


def evaluate(schools, facilities):
    rows = []
    for s in schools:
        p = (s["lon"], s["lat"])
        km = road_km(p)
        cnt = sum(1 for f in facilities if haversine(p, f[1]) <= MILE)
        pss = Fraction(s["nbhd"], s["total"]) if s["total"] > 0 else None
        ca = next((c for c in CA_NAMES if inside(ca_rect(c), *p)), None)
        ct = None
        if ca:
            ct = next(i for i, r in ct_rects(ca) if inside(r, *p))
        rows.append(dict(school=s, km=km, cnt=cnt, pss=pss, ca=ca, ct=ct))
    return rows


def zone_values(rows, key, zone_ids, field):
    cpb = {z: mp.mpf(0) for z in zone_ids}
    members = {z: [] for z in zone_ids}
    for r in rows:
        if r["pss"] is None or r[key] is None:
            continue
        cpb[r[key]] += mp.mpf(r["pss"].numerator) / r["pss"].denominator * r[field]
        members[r[key]].append(r["school"])
    return cpb, members


def check(rows):
    ca_ids = sorted(CA_NAMES)
    ct_ids = [i for ca in ca_ids for i, _ in ct_rects(ca)]
    ca_cpb, ca_mem = zone_values(rows, "ca", ca_ids, "km")
    ct_cpb, ct_mem = zone_values(rows, "ct", ct_ids, "km")

    def top_ok(cpb, mem):
        vals = [float(cpb[z]) for z in cpb]
        if len(set(vals)) < 4:
            return None
        br = jenks_bruteforce(vals, 4)
        top = [z for z in cpb if classify(float(cpb[z]), br) == 3]
        for z in top:
            w = sum(s["total"] for s in mem[z])
            share = sum(s["total"] * s["latinx"] for s in mem[z]) / w
            if share < 0.58:
                return None
        return len(top) / len(cpb)

    ca_ratio = top_ok(ca_cpb, ca_mem)
    ct_ratio = top_ok(ct_cpb, ct_mem)
    if ca_ratio is None or ct_ratio is None or ct_ratio < ca_ratio:
        return None
    return ca_ratio, ct_ratio


def main():
    rng = random.Random(7)
    facilities = []
    for i in range(25):
        if i < 15:
            lon, lat = rng.uniform(-87.74, -87.66), rng.uniform(41.78, 41.84)
        else:
            lon, lat = rng.uniform(-87.74, -87.58), rng.uniform(41.76, 41.88)
        facilities.append((f"T{i + 1:02d}", (round(lon, 6), round(lat, 6))))

    for seed in range(1, 500):
        schools = build(seed)
        rows = evaluate(schools, facilities)
        ratios = check(rows)
        if ratios:
            break
    else:
        sys.exit("no seed satisfied the fixture constraints")
    print(f"seed {seed}: CA top ratio {ratios[0]:.3f}, CT top ratio {ratios[1]:.3f}")

    os.makedirs(OUT, exist_ok=True)
    with open(os.path.join(OUT, "schools.csv"), "w", newline="\n") as f:
        f.write("School_ID,School_Name,Longitude,Latitude,Student_Count_Total,"
                "Student_Count_Neighborhood,Pct_Latinx,Grades\n")
        for s in schools:
            f.write(f"{s['id']},{s['name']},{s['lon']},{s['lat']},{s['total']},{s['nbhd']},"
                    f"{round(s['latinx'] * 100, 1)},K-8\n")

    features = []
    for rid, title, coords in ROADS:
        features.append({"type": "Feature", "id": rid, "properties": {"name": title},
                         "geometry": {"type": "LineString", "coordinates": [list(p) for p in coords]}})
    rid, title, parts = ROAD_MULTI
    features.append({"type": "Feature", "id": rid, "properties": {"name": title},
                     "geometry": {"type": "MultiLineString",
                                  "coordinates": [[list(p) for p in part] for part in parts]}})
    dump(os.path.join(OUT, "industrial_roads.geojson"), features)

    features = [{"type": "Feature", "properties": {"facility_id": fid, "rsei_score": 1000 + 37 * i},
                 "geometry": {"type": "Point", "coordinates": list(p)}}
                for i, (fid, p) in enumerate(facilities)]
    dump(os.path.join(OUT, "tri_facilities.geojson"), features)

    features = []
    for ca in sorted(CA_NAMES):
        features.append({"type": "Feature",
                         "properties": {"area_num": ca, "community": CA_NAMES[ca],
                                        "pct_latinx": RESIDENT_LATINX[ca]},
                         "geometry": {"type": "Polygon", "coordinates": [rect_ring(ca_rect(ca))]}})
    dump(os.path.join(OUT, "community_areas.geojson"), features)

    features = []
    for ca in sorted(CA_NAMES):
        for ct_id, r in ct_rects(ca):
            features.append({"type": "Feature",
                             "properties": {"tract": ct_id, "label": f"Tract {ct_id}"},
                             "geometry": {"type": "Polygon", "coordinates": [rect_ring(r)]}})
    dump(os.path.join(OUT, "census_tracts.geojson"), features)

    with open(os.path.join(OUT, "expected_scores.csv"), "w", newline="\n") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["school_id", "pss", "roads_km", "roads_score", "facilities_count",
                    "facilities_score", "community_area", "census_tract"])
        for r in rows:
            pss = r["pss"]
            if pss is None:
                w.writerow([r["school"]["id"], "", mp.nstr(r["km"], 20), "", r["cnt"], "",
                            r["ca"] or "", r["ct"] or ""])
                continue
            p = mp.mpf(pss.numerator) / pss.denominator
            w.writerow([r["school"]["id"], mp.nstr(p, 20), mp.nstr(r["km"], 20),
                        mp.nstr(p * r["km"], 20), r["cnt"], mp.nstr(p * r["cnt"], 20),
                        r["ca"] or "", r["ct"] or ""])


def dump(path, features):
    with open(path, "w", newline="\n") as f:
        json.dump({"type": "FeatureCollection", "features": features}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
