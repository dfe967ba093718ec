#!/usr/bin/env python3
"""Regenerates the offline provider fixtures in fixtures/provider/.

Each city gets a geocode file and one venues file per category. Every
category holds one real venue (name and coordinates from the reference
matrix row) plus a few seeded synthetic venues scattered around the city center.
Output is deterministic.
"""
import json
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent / "provider"
EARTH_KM = 6371.0

CITIES = {
    "Tokyo": ((35.6812, 139.7671), [
        ("restaurant", "restaurant prunier", 35.677701, 139.761121),
        ("tofu", "Chen Mapo Tofu", 35.677815, 139.736694),
        ("gym", "Gym", 35.675640, 139.758585),
        ("books", "HMV and Books", 35.673216, 139.759761),
        ("river", "river friends", 35.667960, 139.761283),
        ("museum", "Jansem Museum", 35.671814, 139.761493),
        ("station", "Tabitus Station", 35.674524, 139.761528),
        ("bar", "Peter: The Bar", 35.674652, 139.760642),
        ("chinese", "Kozanro Chinese restaurant", 35.673575, 139.762887),
        ("park", "Tokyo FM Ginza Park", 35.672573, 139.763209),
        ("movie", "TOHO Cinemas", 35.660054, 139.729657),
        ("hospital", "Toranomon Hospital", 35.668780, 139.746678),
        ("fish", "Rock Fish", 35.670040, 139.759960),
        ("stationary", "Alpha note stationary", 35.670040, 139.759960),
        ("hardware", "Kawajun Hardware Showroom", 35.681928, 139.787323),
    ]),
    "Kolkata": ((22.5726, 88.3639), [
        ("restaurant", "Oasis Restaurant, Park Street", 22.553118, 88.352491),
        ("gym", "Aura Gym, Park Street", 22.554730, 88.352216),
        ("park", "Elliot Park, Park Street", 22.553883, 88.352672),
        ("ice cream", "Metro Ice Cream, Park Street", 22.553568, 88.352151),
        ("movie", "UFO Moviez India Ltd., 68, Purna Das Rd, Triangular Park", 22.517512, 88.358810),
        ("hospital", "Nightangle Hospital, Shakespeare Sarani", 22.545964, 88.351471),
        ("river", "River Ploice Jetty", 22.564127, 88.338234),
        ("books", "Oxford Bookstore, Park Street", 22.553652, 88.351732),
    ]),
    "Moscow": ((55.7558, 37.6173), [
        ("books", "Coffee and Books", 55.754403, 37.622445),
        ("cyber cafe", "Bosco Cafe", 55.754878, 37.620674),
        ("ice cream", "Ice Cave", 55.751477, 37.628756),
        ("tea", "Moscow Tea", 55.752457, 37.626123),
        ("gym", "Mini Gym Hotel Metropol", 55.758079, 37.620857),
        ("chinese food", "Royal Chinese Restaurant", 55.754480, 37.625580),
    ]),
    "New York": ((40.7128, -74.0060), [
        ("chinese", "Museum of Chinese in America", 40.719361, -73.999086),
        ("thai", "Soho Thai", 40.720117, -73.999504),
        ("coffee", "Kaigo Coffee Room", 40.718633, -74.000367),
        ("books", "Indigo Books HQ Design Studio", 40.719422, -73.997885),
        ("hospital", "Tribeca Soho Animal Hospital", 40.720578, -74.004869),
        ("park", "Columbus Park", 40.715603, -73.999884),
        ("bar", "Onieal's Grand Street Bar and Restaurant", 40.719593, -73.997966),
    ]),
}


def slug(s):
    return s.lower().replace(" ", "_")


def scatter(rng, center, radius_km):
    r = radius_km * math.sqrt(rng.random())
    theta = 2 * math.pi * rng.random()
    km_per_deg = EARTH_KM * math.pi / 180
    lat = center[0] + r * math.cos(theta) / km_per_deg
    lon = center[1] + r * math.sin(theta) / (km_per_deg * math.cos(math.radians(center[0])))
    return round(lat, 6), round(lon, 6)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for city, (center, rows) in CITIES.items():
        rng = random.Random(f"{city}-fixtures")
        (OUT / f"{slug(city)}.geocode.json").write_text(
            json.dumps({"place": city, "lat": center[0], "lon": center[1]}, indent=2) + "\n")
        for category, name, lat, lon in rows:
            venues = [{"id": f"{slug(city)}-{slug(category)}-0", "name": name, "lat": lat, "lon": lon}]
            for i in range(1, 2 + rng.randrange(4)):
                vlat, vlon = scatter(rng, center, 6.0)
                venues.append({"id": f"{slug(city)}-{slug(category)}-{i}",
                               "name": f"{city} {category.title()} {i}", "lat": vlat, "lon": vlon})
            if (city, category) == ("Kolkata", "river"):
                # Far outside any sensible radius; exercises the post-filter.
                venues.append({"id": "kolkata-river-far", "name": "Diamond Harbour Jetty",
                               "lat": 22.1910, "lon": 88.1900})
            (OUT / f"{slug(city)}.{slug(category)}.venues.json").write_text(
                json.dumps({"venues": venues}, indent=2) + "\n")


if __name__ == "__main__":
    main()
