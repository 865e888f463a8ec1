"""Regenerate the committed fixtures under fixtures/.

The small diary is hand-coded (3 egos, 12 ties, 40 contacts; E1 has 4 ties
and 11 contacts, dated across 2004 and 2008 so the compare command has two
populated periods). The CSV pair holds the same logical data.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from contacttrees.diary import (  # noqa: E402
    Contact,
    Diary,
    Ego,
    FEELING_SCALE,
    GENDER_SCALE,
    LIKING_SCALE,
    Ordinal,
    Tie,
    canonical_schema,
    diary_to_json,
    validate_diary,
)
from datetime import date as Date  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")

TIES = [
    # id, ego, gender, age, years_known, liking, is_stranger
    ("T01", "E1", "male", 34, 10.0, "very much", None),
    ("T02", "E1", "female", 5, 1.0, "not much", None),
    ("T03", "E1", "female", 62, 30.0, "somewhat", None),
    ("T04", "E1", "male", 28, 3.0, "very much", None),
    ("T05", "E2", "female", 31, 6.5, "somewhat", None),
    ("T06", "E2", "male", 45, 12.0, "very much", None),
    ("T07", "E2", "female", 27, 0.0, "not at all", True),
    ("T08", "E2", "male", 8, 2.0, "somewhat", None),
    ("T09", "E2", "female", 55, 20.0, "not much", None),
    ("T10", "E3", "male", 71, 35.0, "very much", None),
    ("T11", "E3", "female", 40, 4.0, "somewhat", None),
    ("T12", "E3", "male", 22, 0.5, "not much", None),
]

CONTACTS = [
    # id, tie, date, duration, feeling
    ("C001", "T01", "2004-01-15", 60.0, "better"),
    ("C002", "T01", "2004-02-02", 30.0, "neutral"),
    ("C003", "T01", "2008-03-10", 90.0, "much better"),
    ("C004", "T01", "2008-05-21", 45.0, "better"),
    ("C005", "T02", "2004-01-20", 15.0, "worse"),
    ("C006", "T02", "2004-03-05", 20.0, "neutral"),
    ("C007", "T02", "2008-06-11", 25.0, "better"),
    ("C008", "T03", "2004-02-14", 120.0, "much better"),
    ("C009", "T03", "2008-07-04", 60.0, "better"),
    ("C010", "T04", "2004-03-30", 40.0, "neutral"),
    ("C011", "T04", "2008-08-15", 35.0, "better"),
    ("C012", "T05", "2004-01-05", 50.0, "better"),
    ("C013", "T05", "2004-01-19", 45.0, "neutral"),
    ("C014", "T05", "2004-02-08", 70.0, "much better"),
    ("C015", "T05", "2008-02-20", 30.0, "better"),
    ("C016", "T06", "2004-01-11", 200.0, "much better"),
    ("C017", "T06", "2004-02-25", 90.0, "better"),
    ("C018", "T06", "2004-03-18", 60.0, "better"),
    ("C019", "T06", "2008-04-02", 150.0, "much better"),
    ("C020", "T06", "2008-09-14", 45.0, "neutral"),
    ("C021", "T07", "2004-02-01", 10.0, "much worse"),
    ("C022", "T07", "2004-02-03", 12.0, "worse"),
    ("C023", "T08", "2004-01-28", 35.0, "neutral"),
    ("C024", "T08", "2004-03-12", 40.0, "better"),
    ("C025", "T08", "2008-05-06", 55.0, "better"),
    ("C026", "T09", "2004-01-09", 25.0, "worse"),
    ("C027", "T09", "2004-02-17", 20.0, "neutral"),
    ("C028", "T09", "2008-03-29", 15.0, "worse"),
    ("C029", "T10", "2004-01-07", 80.0, "better"),
    ("C030", "T10", "2004-02-10", 95.0, "much better"),
    ("C031", "T10", "2004-03-22", 110.0, "much better"),
    ("C032", "T10", "2008-01-15", 75.0, "better"),
    ("C033", "T10", "2008-06-30", 85.0, "better"),
    ("C034", "T11", "2004-01-25", 30.0, "neutral"),
    ("C035", "T11", "2004-03-08", 45.0, "better"),
    ("C036", "T11", "2008-07-19", 50.0, "much better"),
    ("C037", "T11", "2008-10-05", 20.0, "neutral"),
    ("C038", "T12", "2004-02-22", 15.0, "worse"),
    ("C039", "T12", "2004-03-15", 18.0, "neutral"),
    ("C040", "T12", "2008-08-08", 22.0, "better"),
]


def build_diary() -> Diary:
    schema = canonical_schema()
    egos = tuple(Ego(e, {}) for e in ("E1", "E2", "E3"))
    ties = []
    for tie_id, ego_id, gender, age, years, liking, stranger in TIES:
        attrs = {
            "gender": Ordinal(GENDER_SCALE.index(gender), GENDER_SCALE),
            "age": age,
            "years_known": years,
            "liking": Ordinal(LIKING_SCALE.index(liking), LIKING_SCALE),
        }
        if stranger is not None:
            attrs["is_stranger"] = stranger
        ties.append(Tie(tie_id, ego_id, attrs))
    contacts = []
    for contact_id, tie_id, when, duration, feeling in CONTACTS:
        contacts.append(Contact(contact_id, tie_id, {
            "date": Date.fromisoformat(when),
            "duration": duration,
            "feeling": Ordinal(FEELING_SCALE.index(feeling), FEELING_SCALE),
        }))
    diary = Diary(schema, egos, tuple(ties), tuple(contacts))
    report = validate_diary(diary)
    assert report.ok, report.errors
    return diary


def write_csv_pair():
    ties_buf = io.StringIO()
    writer = csv.writer(ties_buf, lineterminator="\n")
    writer.writerow(["id", "ego_id", "gender", "age", "years_known", "liking", "is_stranger"])
    for tie_id, ego_id, gender, age, years, liking, stranger in TIES:
        writer.writerow([tie_id, ego_id, gender, age, years, liking,
                         "" if stranger is None else "true"])
    contacts_buf = io.StringIO()
    writer = csv.writer(contacts_buf, lineterminator="\n")
    writer.writerow(["id", "tie_id", "date", "duration", "feeling"])
    for contact_id, tie_id, when, duration, feeling in CONTACTS:
        writer.writerow([contact_id, tie_id, when, duration, feeling])
    with open(os.path.join(FIXTURES, "ties_small.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(ties_buf.getvalue())
    with open(os.path.join(FIXTURES, "contacts_small.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write(contacts_buf.getvalue())


def write_profiles():
    stress = {
        "egos": 1,
        "ties_per_ego": {"kind": "fixed", "value": 819},
        "contacts_total": 4091,
    }
    with open(os.path.join(FIXTURES, "profile_stress.json"), "w", encoding="utf-8") as fh:
        json.dump(stress, fh, indent=2, sort_keys=True)
        fh.write("\n")
    demo = {
        "egos": 2,
        "ties_per_ego": {"kind": "uniform", "lo": 8, "hi": 20},
        "contacts_per_tie": {"kind": "poisson", "mean": 4},
    }
    with open(os.path.join(FIXTURES, "profile_demo.json"), "w", encoding="utf-8") as fh:
        json.dump(demo, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main():
    os.makedirs(FIXTURES, exist_ok=True)
    diary = build_diary()
    with open(os.path.join(FIXTURES, "diary_small.json"), "wb") as fh:
        fh.write(diary_to_json(diary))
    write_csv_pair()
    write_profiles()
    print(f"wrote fixtures for {len(diary.egos)} egos, {len(diary.ties)} ties, {len(diary.contacts)} contacts")


if __name__ == "__main__":
    main()
