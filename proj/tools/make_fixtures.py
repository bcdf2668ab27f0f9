#!/usr/bin/env python3
"""Writes the desk-scale fixture databases under data/databases.

Each database is a directory with schema.json and one CSV per table. The
output is a pure function of the fixed seed below, so re-running the script
reproduces the checked-in files byte for byte.
"""

import argparse
import csv
import json
import random
from pathlib import Path

SEED = 20230710

FIRST = ["jordan", "gabriel", "tiffany", "kris", "jessica", "alexis", "austin", "kyle", "logan", "brittany",
         "haley", "cassandra", "andrew", "john", "cameron", "jordan", "kyle", "logan", "emma", "noah"]
LAST = ["smith", "kim", "lee", "jones", "brown", "davis", "miller", "wilson", "moore", "taylor"]
CITIES = ["san francisco", "san jose", "palo alto", "redwood city", "mountain view"]
ZIPS = [94107, 94301, 94041, 95113, 94063, 94002, 94025, 94103]


def write_db(root, name, tables):
    """tables: list of (table name, [(column, type)], rows)."""
    out = root / name
    out.mkdir(parents=True, exist_ok=True)
    schema = {"name": name, "tables": []}
    for tname, columns, rows in tables:
        fname = f"{tname}.csv"
        schema["tables"].append({
            "name": tname,
            "file": fname,
            "columns": [{"name": c, "type": t} for c, t in columns],
        })
        with open(out / fname, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([c for c, _ in columns])
            for row in rows:
                w.writerow(["" if v is None else v for v in row])
    with open(out / "schema.json", "w", encoding="utf-8") as fh:
        json.dump(schema, fh, indent=2)
        fh.write("\n")


def pets_1(rng):
    pets_cols = [("PetID", "integer"), ("PetType", "text"), ("pet_age", "integer"), ("weight", "real")]
    pets = [(2001, "cat", 3, 12.0), (2002, "dog", 2, 13.4), (2003, "dog", 1, 9.3)]
    archive = [(2002, "dog", 2, 13.4), (1995, "cat", 9, 8.1), (1996, "bird", 7, 0.4),
               (1998, "dog", 5, 21.7), (1999, "hamster", 1, 0.2)]
    student_cols = [("StuID", "integer"), ("LName", "text"), ("Fname", "text"), ("Age", "integer"),
                    ("Sex", "text"), ("Major", "integer"), ("Advisor", "integer"), ("city_code", "text")]
    students = []
    for i in range(18):
        students.append((1001 + i, rng.choice(LAST), rng.choice(FIRST), rng.randint(16, 27),
                         rng.choice("FM"), rng.choice([50, 520, 540, 550, 600]),
                         rng.choice([1121, 1148, 2192, 7271, 8423]),
                         rng.choice(["BAL", "HKG", "WAS", "PIT", "NYC", "LON"])))
    has_pet = [(1001, 2001), (1002, 2002), (1002, 2003), (1005, 2002)]
    return [("Student", student_cols, students), ("Has_Pet", [("StuID", "integer"), ("PetID", "integer")], has_pet),
            ("pets", pets_cols, pets), ("pets_archive", pets_cols, archive)]


def bike_1(rng):
    station_cols = [("id", "integer"), ("name", "text"), ("lat", "real"), ("long", "real"),
                    ("dock_count", "integer"), ("city", "text")]
    stations = []
    for i in range(14):
        stations.append((2 + i * 3, f"station {chr(ord('a') + i)}", round(37.3 + rng.random() * 0.5, 4),
                         round(-122.4 + rng.random() * 0.5, 4), rng.choice([11, 15, 19, 23, 27]),
                         rng.choice(CITIES)))
    status = []
    for i in range(30):
        st = rng.choice(stations)
        bikes = rng.randint(0, st[4])
        status.append((st[0], bikes, st[4] - bikes, f"2015-06-{1 + i // 6:02d} 12:{(i % 6) * 10:02d}:00"))

    weather_cols = [("date", "text"), ("max_temperature_f", "integer"), ("mean_temperature_f", "integer"),
                    ("min_humidity", "integer"), ("max_humidity", "integer"), ("precipitation_inches", "real"),
                    ("events", "text"), ("zip_code", "integer")]
    weather = []
    for i in range(24):
        hi = rng.randint(58, 88)
        lo_h = rng.randint(20, 75)
        weather.append((f"8/{1 + i // 3}/2013", hi, hi - rng.randint(3, 12), lo_h, lo_h + rng.randint(5, 25),
                        None if rng.random() < 0.25 else round(rng.random() * 0.4, 2),
                        rng.choice([None, None, None, "Rain", "Fog", "Fog-Rain"]), ZIPS[i % len(ZIPS)]))

    trip_cols = [("id", "integer"), ("duration", "integer"), ("start_date", "text"), ("start_station_name", "text"),
                 ("start_station_id", "integer"), ("end_station_name", "text"), ("end_station_id", "integer"),
                 ("bike_id", "integer"), ("subscription_type", "text"), ("zip_code", "integer")]

    def trips(n, first_id, year):
        out = []
        for i in range(n):
            s, e = rng.choice(stations), rng.choice(stations)
            out.append((first_id + i, rng.randint(60, 2400), f"8/{rng.randint(1, 8)}/{year} {rng.randint(6, 22)}:"
                        f"{rng.randint(0, 59):02d}", s[1], s[0], e[1], e[0], rng.randint(200, 700),
                        rng.choice(["Subscriber", "Subscriber", "Customer"]),
                        None if rng.random() < 0.1 else rng.choice(ZIPS + [95014, 94404])))
        return out

    trip = trips(40, 900501, 2015)
    trip_2014 = trips(16, 900521, 2014)
    trip_2014[:4] = trip[20:24]  # shared rows keep intersect/except non-trivial
    return [("station", station_cols, stations),
            ("status", [("station_id", "integer"), ("bikes_available", "integer"), ("docks_available", "integer"),
                        ("time", "text")], status),
            ("weather", weather_cols, weather), ("trip", trip_cols, trip), ("trip_2014", trip_cols, trip_2014)]


def network_1(rng):
    hs_cols = [("id", "integer"), ("name", "text"), ("grade", "integer")]
    ids = [1510, 1689, 1381, 1709, 1101, 1782, 1468, 1641, 1247, 1316, 1911, 1501, 1304, 1025, 1934, 1661]
    names = ["jordan", "gabriel", "tiffany", "cassandra", "haley", "andrew", "kris", "brittany", "alexis",
             "austin", "gabriel", "jessica", "jordan", "john", "kyle", "logan"]
    grades = [9, 9, 9, 9, 10, 10, 10, 10, 11, 11, 11, 11, 12, 12, 12, 12]
    hs = list(zip(ids, names, grades))
    hs_2021 = [(i, n, g + 1) for i, n, g in hs[:8]] + [(1950, "ava", 9), (1951, "liam", 9), (1501, "jessica", 11)]
    likes = [(1689, 1709), (1709, 1689), (1782, 1709), (1911, 1247), (1247, 1468), (1641, 1468), (1316, 1304),
             (1501, 1934), (1934, 1501), (1025, 1101)]
    friend = [(1510, 1381), (1510, 1689), (1689, 1709), (1381, 1247), (1709, 1247), (1689, 1782), (1782, 1468),
              (1782, 1316), (1782, 1304), (1468, 1101), (1468, 1641), (1101, 1641), (1247, 1911), (1247, 1501),
              (1911, 1501), (1501, 1934), (1316, 1934), (1934, 1304), (1304, 1661), (1661, 1025)]
    pair = [("student_id", "integer"), ("like_id", "integer")]
    return [("Highschooler", hs_cols, hs), ("Friend", [("student_id", "integer"), ("friend_id", "integer")], friend),
            ("Likes", pair, likes), ("Highschooler_2021", hs_cols, hs_2021)]


def concert_singer(rng):
    stadium_cols = [("Stadium_ID", "integer"), ("Location", "text"), ("Name", "text"), ("Capacity", "integer"),
                    ("Highest", "integer"), ("Lowest", "integer"), ("Average", "integer")]
    stadiums = [(1, "Raith Rovers", "Stark's Park", 10104, 4812, 1294, 2106),
                (2, "Ayr United", "Somerset Park", 11998, 2363, 1057, 1477),
                (3, "East Fife", "Bayview Stadium", 2000, 1980, 533, 864),
                (4, "Queen's Park", "Hampden Park", 52500, 1763, 466, 730),
                (5, "Stirling Albion", "Forthbank Stadium", 3808, 1125, 404, 642),
                (6, "Arbroath", "Gayfield Park", 4125, 921, 411, 638),
                (7, "Alloa Athletic", "Recreation Park", 3100, 1057, 331, 637),
                (9, "Peterhead", "Balmoor", 4000, 837, 400, 615),
                (10, "Brechin City", "Glebe Park", 3960, 780, 315, 552)]
    singer_cols = [("Singer_ID", "integer"), ("Name", "text"), ("Country", "text"), ("Song_Name", "text"),
                   ("Song_release_year", "integer"), ("Age", "integer"), ("Is_male", "text")]
    singers = [(1, "Joe Sharp", "Netherlands", "You", 1992, 52, "F"),
               (2, "Timbaland", "United States", "Dangerous", 2008, 32, "T"),
               (3, "Justin Brown", "France", "Hey Oh", 2013, 29, "T"),
               (4, "Rose White", "France", "Sun", 2003, 41, "F"),
               (5, "John Nizinik", "France", "Gentleman", 2014, 43, "T"),
               (6, "Tribal King", "France", "Love", 2016, 25, "T")]
    singers_2019 = singers[2:] + [(7, "Ana Lima", "Brazil", "Mar", 2018, 27, "F"),
                                  (8, "Kenji Ito", "Japan", "Hoshi", 2019, 35, "T")]
    concert_cols = [("concert_ID", "integer"), ("concert_Name", "text"), ("Theme", "text"),
                    ("Stadium_ID", "integer"), ("Year", "integer")]
    concerts = [(1, "Auditions", "Free choice", 1, 2014), (2, "Super bootcamp", "Free choice 2", 2, 2014),
                (3, "Home Visits", "Bleeding Love", 2, 2015), (4, "Week 1", "Wide Awake", 10, 2014),
                (5, "Week 1", "Happy Tonight", 9, 2015), (6, "Week 2", "Party All Night", 7, 2015)]
    sic = [(1, 2), (1, 3), (1, 5), (2, 3), (2, 6), (3, 5), (4, 4), (5, 6), (5, 3), (6, 2)]
    return [("stadium", stadium_cols, stadiums), ("singer", singer_cols, singers),
            ("concert", concert_cols, concerts),
            ("singer_in_concert", [("concert_ID", "integer"), ("Singer_ID", "integer")], sic),
            ("singer_2019", singer_cols, singers_2019)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "databases"))
    args = ap.parse_args()
    root = Path(args.out)
    for name, build in [("pets_1", pets_1), ("bike_1", bike_1), ("network_1", network_1),
                        ("concert_singer", concert_singer)]:
        write_db(root, name, build(random.Random(f"{SEED}-{name}")))


if __name__ == "__main__":
    main()
