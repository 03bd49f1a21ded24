"""Validate explanation reports against the JSON schema.

Usage: validate_report.py SCHEMA REPORT...

Prints one line per invalid report and exits 1 if any fail.
"""

import json
import sys

import jsonschema


def main(argv):
    if len(argv) < 3:
        print(__doc__.strip(), file=sys.stderr)
        return 64
    with open(argv[1], encoding="utf-8") as f:
        validator = jsonschema.Draft202012Validator(json.load(f))
    failures = 0
    for path in argv[2:]:
        with open(path, encoding="utf-8") as f:
            report = json.load(f)
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        if errors:
            failures += 1
            print(f"{path}: {errors[0].message}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
