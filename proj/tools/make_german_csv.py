#!/usr/bin/env python3
"""Convert the UCI Statlog German Credit data (categorical labels) into the
numeric kredit/laufkont coding used by the original kredit.asc file.

Each categorical attribute is mapped to the integer position of its UCI
attribute code (A11 -> 1, A12 -> 2, ...). Numeric attributes are copied.
The label becomes kredit = 1 (good) / 0 (bad).

usage: make_german_csv.py germancredit.csv > data/german_credit.csv
"""
import csv
import sys

# UCI attribute codes in order, keyed by the label text used in the
# labelled CSV distributed with scorecardpy.
CODES = {
    "status_of_existing_checking_account": (
        "laufkont", 1,
        ["... < 0 DM", "0 <= ... < 200 DM",
         "... >= 200 DM / salary assignments for at least 1 year",
         "no checking account"]),
    "credit_history": (
        "moral", 0,
        ["no credits taken/ all credits paid back duly",
         "all credits at this bank paid back duly",
         "existing credits paid back duly till now",
         "delay in paying off in the past",
         "critical account/ other credits existing (not at this bank)"]),
    "purpose": (
        "verw", 0,
        ["car (new)", "car (used)", "furniture/equipment", "radio/television",
         "domestic appliances", "repairs", "education", "vacation",
         "retraining", "business", "others"]),
    "savings_account_and_bonds": (
        "sparkont", 1,
        ["... < 100 DM", "100 <= ... < 500 DM", "500 <= ... < 1000 DM",
         "... >= 1000 DM", "unknown/ no savings account"]),
    "present_employment_since": (
        "beszeit", 1,
        ["unemployed", "... < 1 year", "1 <= ... < 4 years",
         "4 <= ... < 7 years", "... >= 7 years"]),
    "personal_status_and_sex": (
        "famges", 1,
        ["male : divorced/separated", "female : divorced/separated/married",
         "male : single", "male : married/widowed", "female : single"]),
    "other_debtors_or_guarantors": (
        "buerge", 1, ["none", "co-applicant", "guarantor"]),
    "property": (
        "verm", 1,
        ["real estate", "building society savings agreement/ life insurance",
         "car or other, not in attribute Savings account/bonds",
         "unknown / no property"]),
    "other_installment_plans": ("weitkred", 1, ["bank", "stores", "none"]),
    "housing": ("wohn", 1, ["rent", "own", "for free"]),
    "job": (
        "beruf", 1,
        ["unemployed/ unskilled - non-resident", "unskilled - resident",
         "skilled employee / official",
         "management/ self-employed/ highly qualified employee/ officer"]),
    "telephone": (
        "telef", 1, ["none", "yes, registered under the customers name"]),
    "foreign_worker": ("gastarb", 1, ["yes", "no"]),
}

NUMERIC = {
    "duration_in_month": "laufzeit",
    "credit_amount": "hoehe",
    "installment_rate_in_percentage_of_disposable_income": "rate",
    "present_residence_since": "wohnzeit",
    "age_in_years": "alter",
    "number_of_existing_credits_at_this_bank": "bishkred",
    "number_of_people_being_liable_to_provide_maintenance_for": "pers",
}

ORDER = ["kredit", "laufkont", "laufzeit", "moral", "verw", "hoehe",
         "sparkont", "beszeit", "rate", "famges", "buerge", "wohnzeit",
         "verm", "alter", "weitkred", "wohn", "bishkred", "beruf", "pers",
         "telef", "gastarb"]


def main(path):
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(ORDER)
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            rec = {"kredit": {"good": 1, "bad": 0}[row["creditability"]]}
            for col, (name, base, labels) in CODES.items():
                rec[name] = base + labels.index(row[col])
            for col, name in NUMERIC.items():
                rec[name] = int(row[col])
            out.writerow([rec[k] for k in ORDER])


if __name__ == "__main__":
    main(sys.argv[1])
