"""Runs pie-export and validates the result against the JSON schema."""
import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, schema_path, out_dir = sys.argv[1:4]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for eps in ("0.01", "0.1"):
        out = pathlib.Path(out_dir) / f"eps_{eps}"
        subprocess.run([cli, "pie-export", "--preset", "gu-example", "--eps", eps, "--out", str(out)],
                       check=True, stdout=subprocess.DEVNULL)
        doc = json.loads((out / "pie.json").read_text())
        errors = sorted(validator.iter_errors(doc), key=str)
        for err in errors:
            print(f"eps={eps}: {err.message} at {list(err.path)}")
        failures += len(errors)
        # Matrix payloads must match their declared shapes.
        for name, op in doc["operators"].items():
            for key in ("P",):
                m = op[key]
                if len(m["data"]) != m["rows"] * m["cols"]:
                    print(f"eps={eps}: {name}.{key} data size mismatch")
                    failures += 1
    print("pie schema:", "ok" if failures == 0 else f"{failures} problem(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
