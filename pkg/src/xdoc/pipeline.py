"""Stage construction, pipeline specs and corpus runs.

Every stage maps bytes to serialized XML, so running stages one after the
other through files and running them as a pipeline give identical output.

Spec and config files hold one ``stage key=value ...`` line per stage; keys
may repeat (``tag lexicon=a.lex lexicon=b.lex``).
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import bootstrap as boot
from . import morph, parser, postag, sem, structure
from .annotation import AnnotatedDocument, MalformedXml, parse_xml, serialize_xml
from .resources import resource_path

STAGE_ORDER = ("structure", "tag", "parse", "sem")
BOOTSTRAP = "bootstrap"
KNOWN_KEYS = {
    "structure": {"patterns", "abbrev", "charmap", "colon"},
    "tag": {"lexicon", "heuristics"},
    "parse": {"grammar", "disable", "max-parses"},
    "sem": {"semlex", "frames", "ex7-style", "structural", "flat"},
    BOOTSTRAP: {"threshold"},
}

Options = Dict[str, List[str]]


class PipelineSpecError(ValueError):
    pass


class DependencyOrderError(PipelineSpecError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, source: str, reason: str, position=None):
        self.stage, self.source, self.position = stage, source, position
        where = f"{source}:{position[0]}:{position[1]}" if position else source
        super().__init__(f"{stage}: {where}: {reason}")


@dataclass
class StageSpec:
    name: str
    options: Options = field(default_factory=dict)

    def get(self, key: str, default=None):
        values = self.options.get(key)
        return values[-1] if values else default

    def all(self, key: str) -> List[str]:
        return list(self.options.get(key, ()))

    def flag(self, key: str) -> bool:
        return str(self.get(key, "no")).lower() in ("yes", "true", "1", "on")


@dataclass
class PipelineSpec:
    stages: List[StageSpec]

    def names(self) -> List[str]:
        return [s.name for s in self.stages]


def parse_stage_lines(text: str, source: str = "spec") -> List[StageSpec]:
    stages = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        words = shlex.split(line)
        name = words[0]
        if name not in KNOWN_KEYS:
            raise PipelineSpecError(f"{source}:{lineno}: unknown stage {name!r}")
        options: Options = {}
        for word in words[1:]:
            key, sep, value = word.partition("=")
            if not sep:
                raise PipelineSpecError(f"{source}:{lineno}: expected key=value, got {word!r}")
            if key not in KNOWN_KEYS[name]:
                raise PipelineSpecError(f"{source}:{lineno}: unknown option {key!r} for {name}")
            options.setdefault(key, []).append(value)
        stages.append(StageSpec(name, options))
    return stages


def check_order(names: Sequence[str]) -> None:
    """Reject stage lists that violate structure < tag < parse < sem."""
    last = -1
    seen = set()
    for name in names:
        if name in seen:
            raise DependencyOrderError(f"stage {name} appears twice")
        seen.add(name)
        if name == BOOTSTRAP:
            if "tag" not in seen:
                raise DependencyOrderError("bootstrap requires a preceding tag stage")
            continue
        if BOOTSTRAP in seen:
            raise DependencyOrderError(f"stage {name} cannot follow bootstrap")
        rank = STAGE_ORDER.index(name)
        if rank < last:
            raise DependencyOrderError(
                f"stage {name} must run before {STAGE_ORDER[last]}"
            )
        last = rank


def parse_pipeline_spec(text: str, source: str = "spec") -> PipelineSpec:
    spec = PipelineSpec(parse_stage_lines(text, source))
    if not spec.stages:
        raise PipelineSpecError(f"{source}: no stages")
    check_order(spec.names())
    return spec


def merge_defaults(stage: StageSpec, defaults: Sequence[StageSpec]) -> StageSpec:
    """Config-file options for a stage, overridden key by key by ``stage``'s own."""
    options: Options = {}
    for d in defaults:
        if d.name == stage.name:
            for key, values in d.options.items():
                options[key] = list(values)
    options.update({k: list(v) for k, v in stage.options.items()})
    return StageSpec(stage.name, options)


# -- stage construction ------------------------------------------------------------


StageFn = Callable[[bytes], AnnotatedDocument]


def _xml(data: bytes) -> AnnotatedDocument:
    return parse_xml(data)


def build_structure(spec: StageSpec) -> StageFn:
    patterns = spec.all("patterns") or [str(resource_path("casting.pat"))]
    abbrevs = spec.all("abbrev") or [str(resource_path("abbrev.txt"))]
    terminals = structure.DEFAULT_TERMINALS
    if spec.get("colon") is not None and not spec.flag("colon"):
        terminals = terminals - {":"}
    config = structure.StructureConfig(
        sentence_terminals=terminals,
        patterns=[p for path in patterns for p in structure.load_patterns(path)],
        abbreviations=frozenset().union(*(structure.load_abbreviations(a) for a in abbrevs)),
    )
    charmap = structure.load_charmap(spec.get("charmap")) if spec.get("charmap") else None

    def run(data: bytes) -> AnnotatedDocument:
        return structure.structure(structure.normalize_input(data, charmap), config)

    return run


def build_tag(spec: StageSpec) -> StageFn:
    lex = morph.load_lexicon(spec.all("lexicon") or [resource_path("seed.lex")])
    heuristics = postag.load_heuristics(spec.all("heuristics") or [resource_path("seed.heur")])
    return lambda data: postag.tag_document(_xml(data), lex, heuristics)


def build_parse(spec: StageSpec) -> StageFn:
    grammar_files = spec.all("grammar") or [resource_path("core.gr"), resource_path("telegraphic.gr")]
    grammar = parser.load_grammar(grammar_files, disabled=spec.all("disable"))
    limit = int(spec.get("max-parses", 64))
    opts = parser.ParseOptions(max_parses=limit, max_covers=1)
    return lambda data: parser.parse_document(_xml(data), grammar, opts)


def build_sem(spec: StageSpec) -> StageFn:
    semlex = sem.load_semlex(spec.all("semlex") or [resource_path("seed.sem")])
    rules = sem.load_structural_rules(spec.all("structural")) if spec.all("structural") else []
    frames, ex7, flat = spec.flag("frames"), spec.flag("ex7-style"), spec.flag("flat")

    def run(data: bytes) -> AnnotatedDocument:
        doc = sem.sem_tag(_xml(data), semlex, flat=flat)
        if frames:
            doc = sem.fill_frames(doc, semlex, ex7_style=ex7)
        if rules:
            doc = sem.annotate_relations(doc, rules)
        return doc

    return run


BUILDERS = {"structure": build_structure, "tag": build_tag, "parse": build_parse, "sem": build_sem}


def build_stage(spec: StageSpec) -> StageFn:
    try:
        return BUILDERS[spec.name](spec)
    except (OSError, ValueError) as exc:
        raise StageError(spec.name, "resources", str(exc)) from None


def render(doc: AnnotatedDocument) -> bytes:
    return serialize_xml(doc, declaration=True).encode("utf-8")


def run_stage(name: str, fn: StageFn, data: bytes, source: str) -> bytes:
    try:
        return render(fn(data))
    except MalformedXml as exc:
        raise StageError(name, source, exc.reason, exc.position) from None
    except (ValueError, KeyError) as exc:
        raise StageError(name, source, str(exc)) from None


@dataclass
class CompiledPipeline:
    stages: List[Tuple[str, StageFn]]
    bootstrap: Optional[StageSpec] = None

    def run(self, data: bytes, source: str = "<input>") -> List[Tuple[str, bytes]]:
        """Outputs after every document stage, in order."""
        outputs = []
        for name, fn in self.stages:
            data = run_stage(name, fn, data, source)
            outputs.append((name, data))
        return outputs


def compile_pipeline(spec: PipelineSpec, defaults: Sequence[StageSpec] = ()) -> CompiledPipeline:
    check_order(spec.names())
    stages = []
    boot_spec = None
    for stage in spec.stages:
        stage = merge_defaults(stage, defaults)
        if stage.name == BOOTSTRAP:
            boot_spec = stage
        else:
            stages.append((stage.name, build_stage(stage)))
    return CompiledPipeline(stages, boot_spec)


# -- corpus runs -----------------------------------------------------------------


def output_name(path: Path, stage: Optional[str] = None) -> str:
    return f"{path.stem}.{stage}.xml" if stage else f"{path.stem}.xml"


def run_bootstrap(docs: Sequence[bytes], threshold: float, out_dir: Path) -> boot.BootstrapResult:
    corpus = [parse_xml(d) for d in docs]
    result = boot.bootstrap(corpus, threshold)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "candidates.lex").write_text(boot.format_candidates(result.lexicon), encoding="utf-8")
    (out_dir / "ontology.tsv").write_text(boot.format_ontology(result.ontology), encoding="utf-8")
    return result
