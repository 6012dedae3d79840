"""Command line interface: one subcommand per stage plus pipelines and reports."""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from . import bootstrap as boot
from . import morph
from .annotation import parse_xml
from .parser import derive_lexicon_updates, load_grammar, parse_document, ParseOptions
from .pipeline import (
    BOOTSTRAP,
    CompiledPipeline,
    PipelineSpec,
    PipelineSpecError,
    StageError,
    StageSpec,
    compile_pipeline,
    output_name,
    parse_pipeline_spec,
    parse_stage_lines,
    render,
    run_bootstrap,
)
from .report import AUDIENCES, render_report
from .resources import resource_path

log = logging.getLogger("xdoc")

STDIO = "-"


def _read(path: str) -> bytes:
    if path == STDIO:
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _write(data: bytes, target: Optional[str]) -> None:
    if target is None or target == STDIO:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(target).write_bytes(data)


# -- argument parsing -----------------------------------------------------------


def _io_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("inputs", nargs="*", default=[STDIO], metavar="INPUT",
                   help="input files ('-' for stdin, the default)")
    p.add_argument("-o", "--output",
                   help="output file, or directory when several inputs are given")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xdoc", description="XML document workbench for German text.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--config", help="file of 'stage key=value ...' lines giving default options")
    ap.add_argument("--jobs", type=int, default=1, help="documents processed in parallel")
    ap.add_argument("--keep-intermediate", action="store_true",
                    help="keep per-stage outputs and partial results after failures")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("structure", help="tokenize and split sentences (plain text in)")
    _io_args(p)
    p.add_argument("--patterns", action="append", help="token pattern file (repeatable)")
    p.add_argument("--abbrev", action="append", help="abbreviation list (repeatable)")
    p.add_argument("--charmap", help="character normalization map")
    p.add_argument("--no-colon", action="store_true", help="do not end sentences at ':'")

    p = sub.add_parser("tag", help="part-of-speech tagging")
    _io_args(p)
    p.add_argument("--lexicon", action="append", help="morphological lexicon (repeatable)")
    p.add_argument("--heuristics", action="append", help="heuristics file (repeatable)")

    p = sub.add_parser("parse", help="chart parsing")
    _io_args(p)
    p.add_argument("--grammar", action="append", help="grammar module file (repeatable)")
    p.add_argument("--disable", action="append", help="grammar module to switch off")
    p.add_argument("--max-parses", type=int, help="parses enumerated per sentence")
    p.add_argument("--candidates", help="write lexicon candidates learned from parses here")

    p = sub.add_parser("sem", help="semantic tagging, frames and relations")
    _io_args(p)
    p.add_argument("--semlex", action="append", help="semantic lexicon (repeatable)")
    p.add_argument("--frames", action="store_true", help="fill case frames")
    p.add_argument("--ex7-style", action="store_true", help="relation-named slot elements")
    p.add_argument("--structural", action="append", help="structural interpretation rules")
    p.add_argument("--flat", action="store_true", help="replace tokens instead of wrapping them")

    p = sub.add_parser("bootstrap", help="induce lexicon and ontology candidates from a corpus")
    p.add_argument("corpus", help="directory of .txt or .xml documents")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--threshold", type=float, default=boot.DEFAULT_THRESHOLD)
    p.add_argument("--lexicon", action="append")
    p.add_argument("--heuristics", action="append")

    p = sub.add_parser("pipeline", help="run a pipeline spec over documents")
    p.add_argument("spec", help="pipeline spec file")
    _io_args(p)

    p = sub.add_parser("report", help="render an annotated document as HTML")
    _io_args(p)
    p.add_argument("--audience", choices=AUDIENCES, default="expert")

    p = sub.add_parser("lexicon", help="lexicon maintenance")
    lsub = p.add_subparsers(dest="action", required=True)
    q = lsub.add_parser("import", help="append reviewed candidates to a lexicon")
    q.add_argument("candidates")
    q.add_argument("--into", required=True, help="lexicon file to extend")
    q.add_argument("--min-freq", type=int, default=1)
    return ap


def _stage_spec(args) -> StageSpec:
    """Translate stage flags into the option form used by spec files."""
    opts: Dict[str, List[str]] = {}

    def put(key, values):
        if values:
            opts[key] = [str(v) for v in values]

    cmd = args.command
    if cmd == "structure":
        put("patterns", args.patterns)
        put("abbrev", args.abbrev)
        put("charmap", [args.charmap] if args.charmap else None)
        put("colon", ["no"] if args.no_colon else None)
    elif cmd == "tag":
        put("lexicon", args.lexicon)
        put("heuristics", args.heuristics)
    elif cmd == "parse":
        put("grammar", args.grammar)
        put("disable", args.disable)
        put("max-parses", [args.max_parses] if args.max_parses else None)
    elif cmd == "sem":
        put("semlex", args.semlex)
        put("structural", args.structural)
        for flag in ("frames", "ex7_style", "flat"):
            if getattr(args, flag):
                opts[flag.replace("_", "-")] = ["yes"]
    return StageSpec(cmd, opts)


def _load_config(path: Optional[str]) -> List[StageSpec]:
    if not path:
        return []
    return parse_stage_lines(Path(path).read_text(encoding="utf-8"), path)


# -- document runs ----------------------------------------------------------------

_WORKER: Dict[str, CompiledPipeline] = {}


def _worker_run(spec_stages, defaults, path: str, out: Optional[str], keep: bool) -> Tuple[str, Optional[str]]:
    key = repr((spec_stages, defaults))
    if key not in _WORKER:
        _WORKER[key] = compile_pipeline(PipelineSpec(list(spec_stages)), defaults)
    return _run_one(_WORKER[key], path, out, keep)


def _run_one(pipe: CompiledPipeline, path: str, out: Optional[str], keep: bool) -> Tuple[str, Optional[str]]:
    """Run ``pipe`` on one file; returns (path, error message or None)."""
    written: List[Path] = []
    try:
        outputs = pipe.run(_read(path), path)
        if out is None:
            _write(outputs[-1][1], None)
            return path, None
        target = Path(out)
        if target.is_dir():
            if keep and len(outputs) > 1:
                for stage, data in outputs:
                    p = target / output_name(Path(path), stage)
                    p.write_bytes(data)
                    written.append(p)
            target = target / output_name(Path(path))
        target.write_bytes(outputs[-1][1])
        return path, None
    except (StageError, OSError) as exc:
        if not keep:
            for p in written:
                p.unlink(missing_ok=True)
        return path, str(exc)


def _run_documents(stages: Sequence[StageSpec], defaults: Sequence[StageSpec], inputs: Sequence[str],
                   output: Optional[str], jobs: int, keep: bool) -> int:
    if len(inputs) > 1:
        if not output:
            log.error("several inputs need -o DIRECTORY")
            return 2
        Path(output).mkdir(parents=True, exist_ok=True)
    docs = [s for s in stages if s.name != BOOTSTRAP]
    if not docs:
        return 0
    if jobs > 1 and len(inputs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_worker_run, tuple(docs), tuple(defaults), p, output, keep)
                       for p in inputs]
            results = [f.result() for f in futures]
    else:
        pipe = compile_pipeline(PipelineSpec(list(docs)), defaults)
        results = [_run_one(pipe, p, output, keep) for p in inputs]
    failed = [(p, err) for p, err in results if err]
    for p, err in failed:
        print(f"xdoc: {err}", file=sys.stderr)
    return 1 if failed else 0


def _cmd_stage(args, defaults) -> int:
    spec = _stage_spec(args)
    if args.command == "parse" and args.candidates:
        return _cmd_parse_with_candidates(args, spec, defaults)
    return _run_documents([spec], defaults, args.inputs, args.output, args.jobs, args.keep_intermediate)


def _cmd_parse_with_candidates(args, spec: StageSpec, defaults) -> int:
    from .pipeline import merge_defaults

    spec = merge_defaults(spec, defaults)
    files = spec.all("grammar") or [resource_path("core.gr"), resource_path("telegraphic.gr")]
    grammar = load_grammar(files, disabled=spec.all("disable"))
    opts = ParseOptions(max_parses=int(spec.get("max-parses", 64)), max_covers=1)
    lines: List[str] = []
    status = 0
    for path in args.inputs:
        results = []
        try:
            doc = parse_document(parse_xml(_read(path)), grammar, opts, results)
        except ValueError as exc:
            print(f"xdoc: parse: {path}: {exc}", file=sys.stderr)
            status = 1
            continue
        target = args.output
        if target and len(args.inputs) > 1:
            target = str(Path(target) / output_name(Path(path)))
        _write(render(doc), target)
        for result in results:
            lines += [c.to_line() for c in derive_lexicon_updates(result)]
    Path(args.candidates).write_text("".join(l + "\n" for l in dict.fromkeys(lines)), encoding="utf-8")
    return status


def _cmd_pipeline(args, defaults) -> int:
    try:
        spec = parse_pipeline_spec(Path(args.spec).read_text(encoding="utf-8"), args.spec)
    except PipelineSpecError as exc:
        print(f"xdoc: {exc}", file=sys.stderr)
        return 2
    boot_stage = next((s for s in spec.stages if s.name == BOOTSTRAP), None)
    if boot_stage and not args.output:
        print("xdoc: a bootstrap stage needs -o DIRECTORY", file=sys.stderr)
        return 2
    if boot_stage:
        Path(args.output).mkdir(parents=True, exist_ok=True)
    status = _run_documents(spec.stages, defaults, args.inputs, args.output, args.jobs,
                            args.keep_intermediate)
    if status or not boot_stage:
        return status
    out = Path(args.output)
    docs = [(out / output_name(Path(p))).read_bytes() for p in args.inputs]
    threshold = float(boot_stage.get("threshold", boot.DEFAULT_THRESHOLD))
    run_bootstrap(docs, threshold, out)
    return 0


def _cmd_bootstrap(args, defaults) -> int:
    corpus = sorted(p for p in Path(args.corpus).iterdir() if p.suffix in (".txt", ".xml"))
    tag = StageSpec("tag", {k: v for k, v in (("lexicon", args.lexicon), ("heuristics", args.heuristics)) if v})
    text_pipe = compile_pipeline(PipelineSpec([StageSpec("structure"), tag]), defaults)
    xml_pipe = compile_pipeline(PipelineSpec([tag]), defaults)
    docs = []
    for path in corpus:
        pipe = xml_pipe if path.suffix == ".xml" else text_pipe
        try:
            docs.append(pipe.run(path.read_bytes(), str(path))[-1][1])
        except StageError as exc:
            print(f"xdoc: {exc}", file=sys.stderr)
            return 1
    result = run_bootstrap(docs, args.threshold, Path(args.output))
    print(f"{len(result.findings)} findings, {len(result.lexicon)} candidates, "
          f"{len(result.ontology.clusters)} clusters", file=sys.stderr)
    return 0


def _cmd_report(args, defaults) -> int:
    for path in args.inputs:
        try:
            doc = parse_xml(_read(path))
        except ValueError as exc:
            print(f"xdoc: report: {path}: {exc}", file=sys.stderr)
            return 1
        _write(render_report(doc, args.audience).encode("utf-8"), args.output)
    return 0


def _cmd_lexicon(args, defaults) -> int:
    try:
        candidates = morph.load_lexicon(args.candidates)
        existing = morph.load_lexicon(args.into) if Path(args.into).exists() else morph.Lexicon()
    except morph.LexiconFormatError as exc:
        print(f"xdoc: {exc}", file=sys.stderr)
        return 1
    known = {(e.root, e.pos) for e in existing.entries}
    lines = []
    for entry in candidates.entries:
        if int(entry.get("freq", "1")) < args.min_freq or (entry.root, entry.pos) in known:
            continue
        known.add((entry.root, entry.pos))
        extra = tuple((k, v) for k, v in entry.extra if k != "candidate")
        lines.append(morph.format_entry(morph.LexEntry(entry.root, entry.pos, entry.paradigm,
                                                       entry.fixed_features, extra)))
    if lines:
        text = Path(args.into).read_text(encoding="utf-8") if Path(args.into).exists() else ""
        if text and not text.endswith("\n"):
            text += "\n"
        Path(args.into).write_text(text + "".join(l + "\n" for l in lines), encoding="utf-8")
    print(f"imported {len(lines)} entries into {args.into}", file=sys.stderr)
    return 0


COMMANDS = {
    "structure": _cmd_stage,
    "tag": _cmd_stage,
    "parse": _cmd_stage,
    "sem": _cmd_stage,
    "pipeline": _cmd_pipeline,
    "bootstrap": _cmd_bootstrap,
    "report": _cmd_report,
    "lexicon": _cmd_lexicon,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="xdoc: %(message)s")
    try:
        defaults = _load_config(args.config)
        return COMMANDS[args.command](args, defaults)
    except (PipelineSpecError, StageError, OSError) as exc:
        print(f"xdoc: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
