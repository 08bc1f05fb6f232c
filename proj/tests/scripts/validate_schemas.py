"""Validates task configs, CLI outputs and a game transcript against the JSON schemas."""
import argparse
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def load(path):
    with open(path) as f:
        return json.load(f)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--cli", required=True)
    parser.add_argument("--root", required=True)
    args = parser.parse_args()
    root = pathlib.Path(args.root)
    schemas = {name: load(root / "schemas" / f"{name}.schema.json") for name in ("task", "history", "protocol")}
    for schema in schemas.values():
        jsonschema.Draft202012Validator.check_schema(schema)

    failures = 0

    def check(instance, name, label):
        nonlocal failures
        errors = list(jsonschema.Draft202012Validator(schemas[name]).iter_errors(instance))
        for e in errors:
            print(f"{label}: {e.message} at {list(e.absolute_path)}")
        failures += len(errors)

    for cfg in sorted((root / "config").glob("*.json")):
        check(load(cfg), "task", cfg.name)

    with tempfile.TemporaryDirectory() as tmp:
        runs = [("pendulum", ["--max-iters", "6"]), ("arm_scripted", []), ("quadrotor_scripted", [])]
        for experiment, extra in runs:
            out = pathlib.Path(tmp) / experiment
            subprocess.run([args.cli, "--experiment", experiment, "--out", str(out), *extra],
                           check=True, stdout=subprocess.DEVNULL)
            check(load(out / "history.json"), "history", f"{experiment}/history.json")
            transcript = out / "transcript.jsonl"
            if transcript.exists():
                for i, line in enumerate(transcript.read_text().splitlines()):
                    check(json.loads(line), "protocol", f"{experiment}/transcript.jsonl:{i + 1}")

    for inbound in ({"type": "start", "game": "arm_game"}, {"type": "key", "keys": ["up"], "t": 3},
                    {"type": "confirm"}, {"type": "reset"}):
        check(inbound, "protocol", f"inbound {inbound['type']}")
    rejected = jsonschema.Draft202012Validator(schemas["protocol"]).is_valid({"type": "key", "keys": "up"})
    if rejected:
        print("protocol schema accepted a key message with a string for keys")
        failures += 1

    print(f"{failures} schema violations")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
