"""Command line front end.

Subcommands: render, compare, validate, synth, stats, mapping, serve.
Exit codes: 0 success, 2 bad flags/usage, 3 data errors, 4 mapping errors,
5 too many compare panels.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .diary import (
    DiaryError,
    Period,
    canonical_schema,
    diary_stats,
    diary_to_json,
    load_diary,
    schema_from_json,
    validate_diary,
)
from .layout import InvalidMapping, LayoutParams, UnknownEgo, layout_tree
from .mapping import MappingError, Norms, PRESET_NAMES, mapping_spec_from_json, \
    mapping_spec_to_json, preset_mapping, validate_mapping
from .render import compose_panels, scene_to_json, scene_to_svg
from .synth import InvalidProfile, SynthProfile, generate_synthetic_diary, stress_profile

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MAPPING = 4
EXIT_PANELS = 5


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_mapping(arg: str):
    if arg in PRESET_NAMES:
        return preset_mapping(arg)
    try:
        with open(arg, "rb") as fh:
            return mapping_spec_from_json(fh.read())
    except OSError as exc:
        raise _CliError(EXIT_MAPPING, f"cannot read mapping {arg!r}: {exc}") from None
    except MappingError as exc:
        raise _CliError(EXIT_MAPPING, str(exc)) from None


def _load_params(path: str | None) -> LayoutParams:
    if not path:
        return LayoutParams()
    try:
        with open(path, "rb") as fh:
            raw = json.load(fh)
        return LayoutParams.from_json(raw)
    except OSError as exc:
        raise _CliError(EXIT_USAGE, f"cannot read params {path!r}: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise _CliError(EXIT_USAGE, f"bad params file: {exc}") from None


def _load_data(spec: str, schema_path: str | None):
    schema = None
    if schema_path:
        try:
            with open(schema_path, "rb") as fh:
                schema = schema_from_json(json.load(fh))
        except OSError as exc:
            raise _CliError(EXIT_DATA, f"cannot read schema {schema_path!r}: {exc}") from None
    try:
        return load_diary(spec, schema)
    except OSError as exc:
        raise _CliError(EXIT_DATA, f"cannot read data {spec!r}: {exc}") from None
    except DiaryError as exc:
        raise _CliError(EXIT_DATA, str(exc)) from None


def _parse_period(text: str | None):
    if not text:
        return None
    try:
        return Period.parse(text)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from None


def _check_mapping(spec, diary):
    report = validate_mapping(spec, diary.schema)
    if not report.ok:
        raise _CliError(EXIT_MAPPING, json.dumps(report.to_json()))


def cmd_render(args) -> int:
    t0 = time.perf_counter()
    diary = _load_data(args.data, args.schema)
    t1 = time.perf_counter()
    spec = _load_mapping(args.mapping)
    _check_mapping(spec, diary)
    params = _load_params(args.params)
    period = _parse_period(args.period)
    try:
        scene = layout_tree(diary, args.ego, period, spec, params)
    except UnknownEgo as exc:
        raise _CliError(EXIT_DATA, str(exc)) from None
    except InvalidMapping as exc:
        raise _CliError(EXIT_MAPPING, str(exc)) from None
    t2 = time.perf_counter()

    outputs = []
    base, ext = os.path.splitext(args.out)
    if args.format in ("svg", "both"):
        path = args.out if args.format == "svg" or ext == ".svg" else f"{base}.svg"
        with open(path, "wb") as fh:
            fh.write(scene_to_svg(scene))
        outputs.append(path)
    if args.format in ("json", "both"):
        path = args.out if args.format == "json" and ext == ".json" else f"{base}.json"
        with open(path, "wb") as fh:
            fh.write(scene_to_json(scene))
        outputs.append(path)
    t3 = time.perf_counter()

    report = {
        "ego": args.ego,
        "included": len(scene.curves),
        "excluded": [{"tie": t, "reason": r} for t, r in scene.meta.excluded_ties],
        "excluded_contacts": [{"contact": c, "reason": r} for c, r in scene.meta.excluded_contacts],
        "timing_ms": {
            "parse": max(0.001, (t1 - t0) * 1000.0),
            "layout": max(0.001, (t2 - t1) * 1000.0),
            "render": max(0.001, (t3 - t2) * 1000.0),
        },
        "outputs": outputs,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_compare(args) -> int:
    data_specs = args.data
    periods = args.period or []
    if len(data_specs) == 1 and periods:
        panel_count = len(periods)
    elif len(periods) <= 1:
        panel_count = len(data_specs)
    else:
        raise _CliError(EXIT_USAGE, "use either repeated --data or repeated --period, not both")
    if panel_count < 2:
        raise _CliError(EXIT_USAGE, "compare needs at least 2 panels")
    if panel_count > 3:
        raise _CliError(EXIT_PANELS, f"compare supports at most 3 panels, got {panel_count}")

    spec = _load_mapping(args.mapping)
    params = _load_params(args.params)

    jobs = []
    if len(data_specs) == 1 and periods:
        diary = _load_data(data_specs[0], args.schema)
        parsed = sorted((_parse_period(p) for p in periods), key=lambda p: p.start)
        for period in parsed:
            jobs.append((diary, period, period.label()))
    else:
        period = _parse_period(periods[0]) if periods else None
        for spec_path in data_specs:
            diary = _load_data(spec_path, args.schema)
            caption = os.path.basename(spec_path.split(",")[0])
            jobs.append((diary, period, caption if period is None else f"{caption} {period.label()}"))

    norms = None
    if args.shared_norm:
        values = []
        for diary, period, _ in jobs:
            _check_mapping(spec, diary)
            for tie in diary.ties_of(args.ego):
                for contact in diary.contacts_of(tie.id):
                    if period is not None:
                        when = contact.attributes.get("date")
                        if when is None or not period.contains(when):
                            continue
                    value = contact.attributes.get(spec.leaf_size_source)
                    if isinstance(value, (int, float)) and not isinstance(value, bool):
                        values.append(float(value))
        if values:
            norms = Norms(min(values), max(values))

    panels = []
    for diary, period, caption in jobs:
        _check_mapping(spec, diary)
        try:
            scene = layout_tree(diary, args.ego, period, spec, params, norms_override=norms)
        except UnknownEgo as exc:
            raise _CliError(EXIT_DATA, str(exc)) from None
        except InvalidMapping as exc:
            raise _CliError(EXIT_MAPPING, str(exc)) from None
        panels.append((scene, caption))

    with open(args.out, "wb") as fh:
        fh.write(compose_panels(panels))
    print(json.dumps({"panels": [c for _, c in panels], "out": args.out}, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_validate(args) -> int:
    diary = _load_data(args.data, args.schema)
    report = validate_diary(diary)
    print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    return EXIT_OK if report.ok else EXIT_DATA


def cmd_synth(args) -> int:
    try:
        if args.profile == "stress":
            profile = stress_profile()
        else:
            with open(args.profile, "rb") as fh:
                profile = SynthProfile.from_json(fh.read())
        diary = generate_synthetic_diary(args.seed, profile)
    except OSError as exc:
        raise _CliError(EXIT_DATA, f"cannot read profile: {exc}") from None
    except InvalidProfile as exc:
        raise _CliError(EXIT_DATA, str(exc)) from None
    data = diary_to_json(diary)
    with open(args.out, "wb") as fh:
        fh.write(data)
    print(json.dumps({"egos": len(diary.egos), "ties": len(diary.ties),
                      "contacts": len(diary.contacts), "out": args.out}, sort_keys=True))
    return EXIT_OK


def cmd_stats(args) -> int:
    diary = _load_data(args.data, args.schema)
    print(json.dumps(diary_stats(diary).to_json(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_mapping(args) -> int:
    try:
        spec = preset_mapping(args.preset)
    except MappingError as exc:
        raise _CliError(EXIT_MAPPING, str(exc)) from None
    text = json.dumps(mapping_spec_to_json(spec), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    datasets = {}
    for spec in args.data:
        name = os.path.splitext(os.path.basename(spec.split(",")[0]))[0]
        datasets[name] = _load_data(spec, args.schema)
    port = args.port or int(os.environ.get("CONTACTTREES_PORT", "8000"))
    app = build_app(datasets, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contacttrees",
                                     description="Render contact diaries as botanical trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one ego to SVG and/or scene JSON")
    p.add_argument("--data", required=True, help="diary .json, or 'ties.csv,contacts.csv'")
    p.add_argument("--ego", required=True)
    p.add_argument("--mapping", default="diary-default", help="preset name or mapping JSON path")
    p.add_argument("--params", help="layout params JSON path")
    p.add_argument("--period", help="YYYY or YYYY-MM-DD..YYYY-MM-DD")
    p.add_argument("--schema", help="schema JSON path (CSV data only)")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("svg", "json", "both"), default="svg")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("compare", help="2-3 side-by-side panels for one ego")
    p.add_argument("--data", action="append", required=True)
    p.add_argument("--ego", required=True)
    p.add_argument("--period", action="append")
    p.add_argument("--mapping", default="diary-default")
    p.add_argument("--params")
    p.add_argument("--schema")
    p.add_argument("--shared-norm", action="store_true",
                   help="normalize leaf sizes across panels instead of per panel")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="check a diary and print the report")
    p.add_argument("--data", required=True)
    p.add_argument("--schema")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="generate a synthetic diary")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--profile", required=True, help="profile JSON path, or 'stress'")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stats", help="per-ego tie/contact counts")
    p.add_argument("--data", required=True)
    p.add_argument("--schema")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("mapping", help="export a mapping preset as JSON")
    p.add_argument("preset", choices=PRESET_NAMES)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mapping)

    p = sub.add_parser("serve", help="serve the layout API (and optional viewer)")
    p.add_argument("--data", action="append", required=True)
    p.add_argument("--schema")
    p.add_argument("--port", type=int)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", help="directory of viewer assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
