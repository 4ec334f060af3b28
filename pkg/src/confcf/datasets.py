"""Synthetic desk-scale datasets for demos and tests.

Two generators mirror the shape of well-known tabular benchmarks at the
seven-feature scale this package targets: an income-prediction table
(census-style demographics, binary income label) and an employee-attrition
table (HR records, binary attrition label).  Rows are sampled from a fixed
ground-truth logistic relationship so a trained model has real signal to
recover, and generation is deterministic for a given seed.

``python -m confcf.datasets OUTDIR`` writes both CSVs plus their schema
files.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .model import sigmoid
from .tabular import CATEGORICAL, CONTINUOUS, FeatureSchema, FeatureSpec, SchemaConfig

MARITAL_LEVELS = ("Divorced/Widowed", "Married", "Never Married")
OCCUPATION_LEVELS = ("Admin", "Manual", "Professional", "Sales", "Service")
EDUCATION_LEVELS = (
    "HS or Less",
    "Some College",
    "Professional or Associate Degree",
    "Bachelors",
    "Advanced Degree",
)
JOB_ROLE_LEVELS = ("Lab Technician", "Research Scientist", "Sales Executive", "Manager")


def income_schema() -> SchemaConfig:
    """Seven census-style features predicting a binary income label."""
    features = (
        FeatureSpec("Marital Status", CATEGORICAL, levels=MARITAL_LEVELS),
        FeatureSpec("Years of Education", CONTINUOUS, lower=1.0, upper=16.0),
        FeatureSpec("Occupation", CATEGORICAL, levels=OCCUPATION_LEVELS),
        FeatureSpec("Age", CONTINUOUS, lower=17.0, upper=90.0, mutable=False),
        FeatureSpec("Any capital gains", CATEGORICAL, levels=("No", "Yes")),
        FeatureSpec("Working hours per week", CONTINUOUS, lower=1.0, upper=99.0),
        FeatureSpec("Education", CATEGORICAL, levels=EDUCATION_LEVELS),
    )
    return SchemaConfig(FeatureSchema(features), "income", ("<=50K", ">50K"))


def attrition_schema() -> SchemaConfig:
    """Seven HR features predicting whether an employee leaves."""
    features = (
        FeatureSpec("Overtime", CATEGORICAL, levels=("No", "Yes")),
        FeatureSpec("Marital Status", CATEGORICAL, levels=("Divorced", "Married", "Single")),
        FeatureSpec("Job Role", CATEGORICAL, levels=JOB_ROLE_LEVELS),
        FeatureSpec("Daily Rate", CONTINUOUS, lower=100.0, upper=1500.0),
        FeatureSpec("Age", CONTINUOUS, lower=18.0, upper=60.0, mutable=False),
        FeatureSpec("Years At Company", CONTINUOUS, lower=0.0, upper=40.0),
        FeatureSpec("Job Satisfaction", CONTINUOUS, lower=1.0, upper=4.0),
    )
    return SchemaConfig(FeatureSchema(features), "attrition", ("No", "Yes"))


def make_income_rows(n: int = 2000, seed: int = 7) -> list[dict]:
    """Sample rows (feature mappings plus the label column) for income_schema."""
    rng = np.random.default_rng(seed)
    marital = rng.choice(len(MARITAL_LEVELS), size=n, p=[0.25, 0.5, 0.25])
    education_years = np.round(rng.uniform(4, 16, size=n))
    occupation = rng.integers(0, len(OCCUPATION_LEVELS), size=n)
    age = np.round(rng.uniform(18, 80, size=n))
    gains = (rng.random(n) < 0.12).astype(int)
    hours = np.round(np.clip(rng.normal(40, 11, size=n), 1, 99))
    education = rng.integers(0, len(EDUCATION_LEVELS), size=n)

    marital_effect = np.array([0.2, -1.3, 1.6])[marital]
    occupation_effect = np.array([-0.3, -0.8, 0.9, 0.2, -0.5])[occupation]
    education_effect = np.array([-0.9, -0.3, 0.1, 0.7, 1.2])[education]
    score = (
        -1.1
        + marital_effect
        + occupation_effect
        + education_effect
        + 0.22 * (education_years - 10)
        + 0.015 * (age - 40)
        + 1.5 * gains
        + 0.035 * (hours - 40)
    )
    positive = rng.random(n) < np.array([sigmoid(s) for s in score])

    rows = []
    for i in range(n):
        rows.append(
            {
                "Marital Status": MARITAL_LEVELS[marital[i]],
                "Years of Education": float(education_years[i]),
                "Occupation": OCCUPATION_LEVELS[occupation[i]],
                "Age": float(age[i]),
                "Any capital gains": "Yes" if gains[i] else "No",
                "Working hours per week": float(hours[i]),
                "Education": EDUCATION_LEVELS[education[i]],
                "income": ">50K" if positive[i] else "<=50K",
            }
        )
    return rows


def make_attrition_rows(n: int = 1200, seed: int = 11) -> list[dict]:
    """Sample rows for attrition_schema."""
    rng = np.random.default_rng(seed)
    overtime = (rng.random(n) < 0.3).astype(int)
    marital = rng.integers(0, 3, size=n)
    role = rng.integers(0, len(JOB_ROLE_LEVELS), size=n)
    daily_rate = np.round(rng.uniform(100, 1500, size=n))
    age = np.round(rng.uniform(18, 60, size=n))
    years = np.round(np.clip(rng.exponential(6, size=n), 0, 40))
    satisfaction = np.round(rng.uniform(1, 4, size=n))

    marital_effect = np.array([-0.2, -0.6, 0.9])[marital]
    role_effect = np.array([0.6, -0.4, 0.3, -0.8])[role]
    score = (
        -0.4
        + 1.2 * overtime
        + marital_effect
        + role_effect
        - 0.0016 * (daily_rate - 800)
        - 0.03 * (age - 37)
        - 0.06 * years
        - 0.45 * (satisfaction - 2.5)
    )
    leaves = rng.random(n) < np.array([sigmoid(s) for s in score])

    rows = []
    for i in range(n):
        rows.append(
            {
                "Overtime": "Yes" if overtime[i] else "No",
                "Marital Status": ("Divorced", "Married", "Single")[marital[i]],
                "Job Role": JOB_ROLE_LEVELS[role[i]],
                "Daily Rate": float(daily_rate[i]),
                "Age": float(age[i]),
                "Years At Company": float(years[i]),
                "Job Satisfaction": float(satisfaction[i]),
                "attrition": "Yes" if leaves[i] else "No",
            }
        )
    return rows


def write_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(
                {k: (f"{v:g}" if isinstance(v, float) else v) for k, v in row.items()}
            )


def write_demo(directory, n_income: int = 2000, n_attrition: int = 1200) -> list[Path]:
    """Write both demo datasets and their schemas; returns the created paths."""
    from .tabular import save_schema

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    created = []
    for stem, config, rows in (
        ("income7", income_schema(), make_income_rows(n_income)),
        ("attrition7", attrition_schema(), make_attrition_rows(n_attrition)),
    ):
        csv_path = directory / f"{stem}.csv"
        schema_path = directory / f"{stem}_schema.yaml"
        write_csv(csv_path, rows)
        save_schema(config, schema_path)
        created.extend([csv_path, schema_path])
    return created


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(description="write the demo datasets")
    parser.add_argument("directory", help="output directory")
    args = parser.parse_args(argv)
    for path in write_demo(args.directory):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
