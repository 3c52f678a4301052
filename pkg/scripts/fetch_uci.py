#!/usr/bin/env python3
"""Fetch and normalise the nine UCI benchmark datasets.

Run on a machine with internet access:

    python3 scripts/fetch_uci.py            # writes data/uci/<name>.csv
    python3 scripts/fetch_uci.py --only kidney wine
    python3 scripts/fetch_uci.py --dest /tmp/uci

then copy data/uci/ into the repository checkout if you fetched elsewhere.
The UCI benchmark tests skip while these files are absent.

Every output file has a header row, one column per retained attribute, and a
final ``label`` column holding ``positive`` / ``negative``.  Missing cells
("?" in the sources) become empty cells.  No ``id`` column is emitted: some
sources repeat their sample codes, so row identity is left to the loader.

Positive-class conventions (one binary task per dataset):

  breast-w     malignant biopsies (class 4); sample code column dropped
  ecoli        cytoplasm localisation (cp), the largest class
  kidney       chronic kidney disease (ckd)
  voting       republican representatives; abstentions stay missing
  autism       positive screening (Class/ASD = YES); the ``result`` score the
               label is derived from and the constant ``age_desc`` are dropped
  ionosphere   good radar returns (g)
  sonar        mines (M) against rocks
  heart        presence of heart disease (class 2, Statlog version)
  wine         the largest cultivar (class 2) against the other two
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"

# Row counts of the frozen source files; a mismatch usually means the
# download was truncated or the source moved.
EXPECTED_ROWS = {
    "breast-w": 699, "ecoli": 336, "kidney": 400, "voting": 435,
    "autism": 704, "ionosphere": 351, "sonar": 208, "heart": 270, "wine": 178,
}


def _get(url: str) -> bytes:
    req = urllib.request.Request(url, headers={"User-Agent": "dataset-fetch/1.0"})
    with urllib.request.urlopen(req, timeout=60) as resp:
        return resp.read()


def _zip_member(blob: bytes, suffix: str, avoid: str = "") -> str:
    """Decode the first archive member whose name ends with ``suffix``."""
    with zipfile.ZipFile(io.BytesIO(blob)) as zf:
        names = [n for n in zf.namelist() if n.endswith(suffix)]
        if avoid:
            preferred = [n for n in names if avoid not in n]
            names = preferred or names
        if not names:
            raise SystemExit(f"no member matching *{suffix} in archive")
        return zf.read(names[0]).decode("utf-8", errors="replace")


def _arff(text: str) -> tuple[list[str], list[list[str]]]:
    """Minimal ARFF reader: attribute names plus raw data cells.

    Handles the quirks of the files used here — single-quoted values, stray
    tabs inside cells, and short rows (padded with missing cells).
    """
    names: list[str] = []
    rows: list[list[str]] = []
    in_data = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        low = line.lower()
        if low.startswith("@attribute"):
            rest = line.split(None, 1)[1].strip()
            if rest.startswith(("'", '"')):
                quote = rest[0]
                names.append(rest[1:rest.index(quote, 1)])
            else:
                names.append(rest.split(None, 1)[0])
        elif low.startswith("@data"):
            in_data = True
        elif in_data:
            cells = next(csv.reader([line], quotechar="'", skipinitialspace=True))
            cells = [c.replace("\t", " ").strip() for c in cells]
            if len(cells) < len(names):
                cells += [""] * (len(names) - len(cells))
            rows.append(cells[: len(names)])
    return names, rows


def _missing(cell: str) -> str:
    return "" if cell.strip() in {"", "?"} else cell.strip()


def _label(value: str, positive: str) -> str:
    return "positive" if value == positive else "negative"


# --- one prepare function per dataset: returns (header, rows) ---------------


def breast_w() -> tuple[list[str], list[list[str]]]:
    text = _get(f"{BASE}/breast-cancer-wisconsin/breast-cancer-wisconsin.data").decode()
    header = [
        "clump_thickness", "uniformity_cell_size", "uniformity_cell_shape",
        "marginal_adhesion", "single_epithelial_cell_size", "bare_nuclei",
        "bland_chromatin", "normal_nucleoli", "mitoses", "label",
    ]
    rows = []
    for cells in csv.reader(text.splitlines()):
        if len(cells) != 11:
            continue
        rows.append([_missing(c) for c in cells[1:10]] + [_label(cells[10], "4")])
    return header, rows


def ecoli() -> tuple[list[str], list[list[str]]]:
    text = _get(f"{BASE}/ecoli/ecoli.data").decode()
    header = ["mcg", "gvh", "lip", "chg", "aac", "alm1", "alm2", "label"]
    rows = []
    for line in text.splitlines():
        cells = line.split()
        if len(cells) != 9:
            continue
        rows.append(cells[1:8] + [_label(cells[8], "cp")])
    return header, rows


def kidney() -> tuple[list[str], list[list[str]]]:
    blob = _get(f"{BASE}/00336/Chronic_Kidney_Disease.zip")
    names, data = _arff(_zip_member(blob, ".arff", avoid="_full"))
    header = [n.lower() for n in names[:-1]] + ["label"]
    rows = []
    for cells in data:
        if not any(cells):
            continue
        rows.append([_missing(c) for c in cells[:-1]]
                    + [_label(_missing(cells[-1]), "ckd")])
    return header, rows


def voting() -> tuple[list[str], list[list[str]]]:
    text = _get(f"{BASE}/voting-records/house-votes-84.data").decode()
    issues = [
        "handicapped_infants", "water_project_cost_sharing",
        "adoption_of_the_budget_resolution", "physician_fee_freeze",
        "el_salvador_aid", "religious_groups_in_schools",
        "anti_satellite_test_ban", "aid_to_nicaraguan_contras", "mx_missile",
        "immigration", "synfuels_corporation_cutback", "education_spending",
        "superfund_right_to_sue", "crime", "duty_free_exports",
        "export_administration_act_south_africa",
    ]
    rows = []
    for cells in csv.reader(text.splitlines()):
        if len(cells) != 17:
            continue
        rows.append([_missing(c) for c in cells[1:]]
                    + [_label(cells[0], "republican")])
    return issues + ["label"], rows


def autism() -> tuple[list[str], list[list[str]]]:
    blob = _get(f"{BASE}/00426/Autism-Adult-Data%20Plus%20Description%20File.zip")
    names, data = _arff(_zip_member(blob, ".arff"))
    rename = {
        "jundice": "jaundice", "austim": "family_autism",
        "contry_of_res": "country_of_residence", "Class/ASD": "label",
    }
    drop = {"result", "age_desc"}
    keep = [i for i, n in enumerate(names) if n not in drop]
    header = [rename.get(names[i], names[i]).lower() for i in keep]
    rows = []
    for cells in data:
        out = [_missing(cells[i]) for i in keep]
        out[-1] = _label(out[-1], "YES")
        rows.append(out)
    return header, rows


def ionosphere() -> tuple[list[str], list[list[str]]]:
    text = _get(f"{BASE}/ionosphere/ionosphere.data").decode()
    header = [f"pulse{i:02d}" for i in range(1, 35)] + ["label"]
    rows = []
    for cells in csv.reader(text.splitlines()):
        if len(cells) != 35:
            continue
        rows.append(cells[:-1] + [_label(cells[-1], "g")])
    return header, rows


def sonar() -> tuple[list[str], list[list[str]]]:
    text = _get(f"{BASE}/undocumented/connectionist-bench/sonar/sonar.all-data").decode()
    header = [f"band{i:02d}" for i in range(1, 61)] + ["label"]
    rows = []
    for cells in csv.reader(text.splitlines()):
        if len(cells) != 61:
            continue
        rows.append(cells[:-1] + [_label(cells[-1], "M")])
    return header, rows


def heart() -> tuple[list[str], list[list[str]]]:
    text = _get(f"{BASE}/statlog/heart/heart.dat").decode()
    header = [
        "age", "sex", "chest_pain_type", "resting_blood_pressure",
        "serum_cholesterol", "fasting_blood_sugar", "resting_ecg",
        "max_heart_rate", "exercise_induced_angina", "oldpeak", "slope",
        "major_vessels", "thal", "label",
    ]
    rows = []
    for line in text.splitlines():
        cells = line.split()
        if len(cells) != 14:
            continue
        rows.append(cells[:-1] + [_label(cells[-1], "2")])
    return header, rows


def wine() -> tuple[list[str], list[list[str]]]:
    text = _get(f"{BASE}/wine/wine.data").decode()
    header = [
        "alcohol", "malic_acid", "ash", "alcalinity_of_ash", "magnesium",
        "total_phenols", "flavanoids", "nonflavanoid_phenols",
        "proanthocyanins", "color_intensity", "hue", "od280_od315",
        "proline", "label",
    ]
    rows = []
    for cells in csv.reader(text.splitlines()):
        if len(cells) != 14:
            continue
        rows.append(cells[1:] + [_label(cells[0], "2")])
    return header, rows


PREPARERS = {
    "breast-w": breast_w, "ecoli": ecoli, "kidney": kidney, "voting": voting,
    "autism": autism, "ionosphere": ionosphere, "sonar": sonar,
    "heart": heart, "wine": wine,
}


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", nargs="*", metavar="NAME", choices=sorted(PREPARERS),
                    help="fetch a subset of the datasets")
    ap.add_argument("--dest", default=str(Path(__file__).parent.parent / "data" / "uci"),
                    help="output directory (default: data/uci next to the package)")
    ap.add_argument("--force", action="store_true",
                    help="write files even when the row count looks wrong")
    args = ap.parse_args(argv)

    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    names = args.only or sorted(PREPARERS)
    failures = 0
    for name in names:
        try:
            header, rows = PREPARERS[name]()
        except Exception as exc:  # keep going; report at the end
            print(f"{name}: FAILED ({type(exc).__name__}: {exc})", file=sys.stderr)
            failures += 1
            continue
        expected = EXPECTED_ROWS[name]
        if len(rows) != expected and not args.force:
            print(f"{name}: got {len(rows)} rows, expected {expected}; "
                  "source may have changed (use --force to write anyway)",
                  file=sys.stderr)
            failures += 1
            continue
        out = dest / f"{name}.csv"
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        print(f"{name}: wrote {len(rows)} rows, {len(header) - 1} features -> {out}")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
