"""Problem files: parsing, validation, and realization.

A problem file is TOML with the sections below.  Permutations are quoted
cycle strings, subgroups are lists of permutations that must denote
elements of the group, and the torus is given in the surface syntax
`split(d) | weil | norm1 | perm(LABEL) | dual(e) | sum(e1, e2)`.

    [group]
    generators = ["(1 2)", "(3 4)"]
    order_cap = 128

    [subgroups]
    H1 = ["(1 2)"]

    [torus]
    spec = "norm1"

    [places]
    mode = "chebotarev"            # or "explicit" / "mixed"
    assume_cyclic_ramification = true
    extra = []                     # subgroup labels

    [assumptions]
    global_point = false
    local_points_everywhere = true
    # pic_order_override = 2       # optional

Parsing is split from realization: `parse_problem_file` checks syntax and
label references without building anything, `instantiate_problem` builds
the group, lattice, place profile and assumptions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

try:
    import tomllib  # Python 3.11+
except ModuleNotFoundError:  # pragma: no cover - version dependent
    import tomli as tomllib

from .arith import PlaceProfile, TorsorAssumptions
from .errors import ParseError, UnknownLabel
from .groups import FiniteGroup, Subgroup, group_from_permutations, parse_permutation, subgroup_closure
from .lattice import (
    CosetAction,
    DirectSum,
    Dual,
    GLattice,
    NormOne,
    Split,
    TorusSpec,
    WeilRestriction,
    build_torus_lattice,
)

DEFAULT_ORDER_CAP = 128


@dataclass(frozen=True)
class Problem:
    """A parsed problem file: raw data plus validated references."""

    generators: tuple[str, ...]
    order_cap: int
    subgroups: tuple[tuple[str, tuple[str, ...]], ...]
    torus_text: str
    places_mode: str
    assume_cyclic_ramification: bool
    extra_places: tuple[str, ...]
    global_point: bool
    local_points_everywhere: bool
    pic_order_override: int | None = None

    def to_text(self) -> str:
        """Regenerate a problem file; parse(to_text(p)) == p."""
        lines = ["[group]"]
        lines.append("generators = [" + ", ".join(f'"{g}"' for g in self.generators) + "]")
        lines.append(f"order_cap = {self.order_cap}")
        lines.append("")
        lines.append("[subgroups]")
        for label, gens in self.subgroups:
            lines.append(f"{label} = [" + ", ".join(f'"{g}"' for g in gens) + "]")
        lines.append("")
        lines.append("[torus]")
        lines.append(f'spec = "{self.torus_text}"')
        lines.append("")
        lines.append("[places]")
        lines.append(f'mode = "{self.places_mode}"')
        lines.append(f"assume_cyclic_ramification = {str(self.assume_cyclic_ramification).lower()}")
        lines.append("extra = [" + ", ".join(f'"{x}"' for x in self.extra_places) + "]")
        lines.append("")
        lines.append("[assumptions]")
        lines.append(f"global_point = {str(self.global_point).lower()}")
        lines.append(f"local_points_everywhere = {str(self.local_points_everywhere).lower()}")
        if self.pic_order_override is not None:
            lines.append(f"pic_order_override = {self.pic_order_override}")
        return "\n".join(lines) + "\n"


_KNOWN_KEYS = {
    "group": {"generators", "order_cap"},
    "torus": {"spec"},
    "places": {"mode", "assume_cyclic_ramification", "extra"},
    "assumptions": {"global_point", "local_points_everywhere", "pic_order_override"},
}


def parse_problem_file(text: str) -> Problem:
    """Parse and validate a problem file; see the module docstring for the format."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"problem file is not valid TOML: {exc}") from None

    for section in data:
        if section not in ("group", "subgroups", "torus", "places", "assumptions"):
            raise ParseError(f"unknown section [{section}]")
    for section, allowed in _KNOWN_KEYS.items():
        for key in data.get(section, {}):
            if key not in allowed:
                raise ParseError(f"unknown key {key!r} in section [{section}]")

    group_tbl = data.get("group")
    if not isinstance(group_tbl, dict) or "generators" not in group_tbl:
        raise ParseError("missing [group] section with a generators list")
    generators = group_tbl["generators"]
    if not isinstance(generators, list) or any(not isinstance(g, str) for g in generators):
        raise ParseError("[group].generators must be a list of cycle strings")
    for g in generators:
        parse_permutation(g)  # BadPermutation on malformed input
    order_cap = group_tbl.get("order_cap", DEFAULT_ORDER_CAP)
    if not isinstance(order_cap, int) or isinstance(order_cap, bool) or order_cap < 1:
        raise ParseError("[group].order_cap must be a positive integer")

    subs_tbl = data.get("subgroups", {})
    if not isinstance(subs_tbl, dict):
        raise ParseError("[subgroups] must be a table of label = [cycles]")
    subgroups = []
    for label, gens in subs_tbl.items():
        if not isinstance(gens, list) or any(not isinstance(g, str) for g in gens):
            raise ParseError(f"subgroup {label!r} must be a list of cycle strings")
        for g in gens:
            parse_permutation(g)
        subgroups.append((label, tuple(gens)))
    subgroups.sort()
    labels = {label for label, _ in subgroups}

    torus_tbl = data.get("torus")
    if not isinstance(torus_tbl, dict) or not isinstance(torus_tbl.get("spec"), str):
        raise ParseError("missing [torus] section with a spec string")
    torus_text = torus_tbl["spec"]
    spec = parse_torus_spec(torus_text)
    for ref in _spec_labels(spec):
        if ref not in labels:
            raise UnknownLabel(f"torus spec refers to undefined subgroup {ref!r}")

    places_tbl = data.get("places", {})
    mode = places_tbl.get("mode", "chebotarev")
    if mode not in ("chebotarev", "explicit", "mixed"):
        raise ParseError(f"[places].mode must be chebotarev, explicit or mixed, got {mode!r}")
    assume = places_tbl.get("assume_cyclic_ramification", False)
    if not isinstance(assume, bool):
        raise ParseError("[places].assume_cyclic_ramification must be a boolean")
    extra = places_tbl.get("extra", [])
    if not isinstance(extra, list) or any(not isinstance(x, str) for x in extra):
        raise ParseError("[places].extra must be a list of subgroup labels")
    for ref in extra:
        if ref not in labels:
            raise UnknownLabel(f"places list refers to undefined subgroup {ref!r}")
    if mode == "explicit" and not extra:
        raise ParseError("explicit places mode needs a non-empty extra list")

    asm_tbl = data.get("assumptions", {})
    global_point = asm_tbl.get("global_point", False)
    local_points = asm_tbl.get("local_points_everywhere", False)
    if not isinstance(global_point, bool) or not isinstance(local_points, bool):
        raise ParseError("[assumptions] flags must be booleans")
    override = asm_tbl.get("pic_order_override")
    if override is not None and (not isinstance(override, int) or isinstance(override, bool)):
        raise ParseError("pic_order_override must be an integer")

    return Problem(
        generators=tuple(generators),
        order_cap=order_cap,
        subgroups=tuple(subgroups),
        torus_text=torus_text,
        places_mode=mode,
        assume_cyclic_ramification=assume,
        extra_places=tuple(extra),
        global_point=global_point,
        local_points_everywhere=local_points,
        pic_order_override=override,
    )


# ---------------------------------------------------------------------------
# torus surface syntax
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|\d+|[(),])")


@dataclass(frozen=True)
class _LabelRef(TorusSpec):
    """Parser-internal: a bare name, only legal inside perm(...)."""

    name: str


def _tokenize(text: str) -> list[tuple[str, int]]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(
                    f"unexpected character {text[pos:].strip()[0]!r} in torus spec at column {pos + 1}"
                )
            break
        out.append((m.group(1), m.start(1)))
        pos = m.end()
    return out


def parse_torus_spec(text: str) -> TorusSpec:
    """Parse the torus surface syntax into a spec tree.

    Subgroup references stay as label strings; `resolve_spec_labels`
    replaces them with actual subgroups.
    """
    tokens = _tokenize(text)
    spec, rest = _parse_expr(tokens, text)
    if rest:
        raise ParseError(f"trailing input in torus spec at column {rest[0][1] + 1}")
    _reject_bare_labels(spec)
    return spec


def _reject_bare_labels(spec: TorusSpec) -> None:
    if isinstance(spec, _LabelRef):
        raise ParseError(f"{spec.name!r} is not a torus constructor")
    if isinstance(spec, Dual):
        _reject_bare_labels(spec.inner)
    elif isinstance(spec, DirectSum):
        _reject_bare_labels(spec.left)
        _reject_bare_labels(spec.right)


def _parse_expr(tokens, text) -> tuple[TorusSpec, list]:
    if not tokens:
        raise ParseError("empty torus spec")
    name, col = tokens[0]
    if not name[0].isalpha() and name[0] != "_":
        raise ParseError(f"expected a constructor name at column {col + 1}")
    tokens = tokens[1:]
    args: list = []
    if tokens and tokens[0][0] == "(":
        tokens = tokens[1:]
        while True:
            if not tokens:
                raise ParseError("unterminated argument list in torus spec")
            if tokens[0][0] == ")":
                tokens = tokens[1:]
                break
            if tokens[0][0].isdigit():
                args.append(int(tokens[0][0]))
                tokens = tokens[1:]
            else:
                inner, tokens = _parse_expr(tokens, text)
                args.append(inner)
            if tokens and tokens[0][0] == ",":
                tokens = tokens[1:]
            elif tokens and tokens[0][0] != ")":
                raise ParseError(f"expected ',' or ')' at column {tokens[0][1] + 1}")
    return _make_node(name, args, col), tokens


def _make_node(name: str, args: list, col: int) -> TorusSpec:
    if name == "split":
        if len(args) != 1 or not isinstance(args[0], int):
            raise ParseError("split takes one integer argument")
        return Split(args[0])
    if name == "weil":
        if args:
            raise ParseError("weil takes no arguments")
        return WeilRestriction()
    if name == "norm1":
        if args:
            raise ParseError("norm1 takes no arguments")
        return NormOne()
    if name == "perm":
        if len(args) != 1 or not isinstance(args[0], _LabelRef):
            raise ParseError("perm takes one subgroup label")
        label = args[0].name
        return CosetAction(label, label)
    if name == "dual":
        if len(args) != 1 or not isinstance(args[0], TorusSpec) or isinstance(args[0], _LabelRef):
            raise ParseError("dual takes one torus expression")
        return Dual(args[0])
    if name == "sum":
        if len(args) != 2 or not all(
            isinstance(a, TorusSpec) and not isinstance(a, _LabelRef) for a in args
        ):
            raise ParseError("sum takes exactly two torus expressions")
        return DirectSum(args[0], args[1])
    # a bare name is only meaningful as a label inside perm(...)
    if not args:
        return _LabelRef(name)
    raise ParseError(f"unknown torus constructor {name!r} at column {col + 1}")


def _spec_labels(spec: TorusSpec) -> list[str]:
    if isinstance(spec, CosetAction) and isinstance(spec.subgroup, str):
        return [spec.subgroup]
    if isinstance(spec, Dual):
        return _spec_labels(spec.inner)
    if isinstance(spec, DirectSum):
        return _spec_labels(spec.left) + _spec_labels(spec.right)
    return []


def resolve_spec_labels(spec: TorusSpec, table: dict[str, Subgroup]) -> TorusSpec:
    """Replace label references with resolved subgroups."""
    if isinstance(spec, CosetAction) and isinstance(spec.subgroup, str):
        if spec.subgroup not in table:
            raise UnknownLabel(f"undefined subgroup {spec.subgroup!r}")
        return CosetAction(table[spec.subgroup], spec.subgroup)
    if isinstance(spec, Dual):
        return Dual(resolve_spec_labels(spec.inner, table))
    if isinstance(spec, DirectSum):
        return DirectSum(
            resolve_spec_labels(spec.left, table),
            resolve_spec_labels(spec.right, table),
        )
    return spec


# ---------------------------------------------------------------------------
# realization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemInstance:
    group: FiniteGroup
    subgroups: tuple[tuple[str, Subgroup], ...]
    lattice: GLattice
    places: PlaceProfile
    assumptions: TorsorAssumptions


def instantiate_problem(problem: Problem, *, order_cap: int | None = None) -> ProblemInstance:
    """Build the group, lattice, places and assumptions a problem describes.

    `order_cap`, when given, overrides the file's cap (the CLI wires the
    TATE_TORI_ORDER_CAP environment variable through here).
    """
    cap = order_cap if order_cap is not None else problem.order_cap
    group = group_from_permutations(list(problem.generators), order_cap=cap)

    table: dict[str, Subgroup] = {}
    for label, gens in problem.subgroups:
        indices = [group.element_index(parse_permutation(g)) for g in gens]
        table[label] = subgroup_closure(group, indices)

    spec = resolve_spec_labels(parse_torus_spec(problem.torus_text), table)
    lattice = build_torus_lattice(group, spec)

    if problem.places_mode == "chebotarev":
        places = PlaceProfile.chebotarev(
            group, cyclic_ramification_asserted=problem.assume_cyclic_ramification
        )
    elif problem.places_mode == "explicit":
        places = PlaceProfile.explicit(
            [(label, table[label]) for label in problem.extra_places]
        )
    else:
        places = PlaceProfile.mixed(
            group, [(label, table[label]) for label in problem.extra_places]
        )

    assumptions = TorsorAssumptions(
        has_global_point=problem.global_point,
        has_local_points_everywhere=problem.local_points_everywhere,
        pic_order_override=problem.pic_order_override,
    )
    return ProblemInstance(group, tuple(table.items()), lattice, places, assumptions)
