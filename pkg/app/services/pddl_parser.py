# app/services/pddl_parser.py
"""
Reader for the supported PDDL subset and for goal-operator (.gop) files.

Both formats share one s-expression grammar (lark). A second, hand-written
pass turns the tree into Domain / Problem / GoalOperator values and reports
the first problem with its line and column. The accepted subset is
documented in docs/grammar.md.
"""
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from app.core.exceptions import ConfigurationError, PddlSemanticError, PddlSyntaxError, UnsupportedFeatureError
from app.models.goal import GoalOperator, PromiseTemplate
from app.models.pddl import ActionSchema, Domain, Param, Problem, is_variable
from app.models.world import Atom, Literal, Time, TimedState

logger = logging.getLogger("app.services.pddl_parser")  # Logger for this module

SEXP_GRAMMAR = r"""
    start: _item*
    _item: list | SYMBOL | STRING
    list: "(" _item* ")"
    SYMBOL: /[^\s()";]+/
    STRING: /"[^"]*"/
    COMMENT: /;[^\n]*/
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

SUPPORTED_REQUIREMENTS = {
    ":strips", ":typing", ":negative-preconditions", ":durative-actions",
    ":timed-initial-literals", ":equality",
}

_UNSUPPORTED_CONNECTIVES = {"or", "imply", "exists", "forall", "when", "increase", "decrease", "assign"}


class SAtom(str):
    """A symbol or string with its source position."""
    line: int
    column: int
    quoted: bool

    def __new__(cls, value: str, line: int, column: int, quoted: bool = False):
        obj = super().__new__(cls, value)
        obj.line = line
        obj.column = column
        obj.quoted = quoted
        return obj


class SList(list):
    def __init__(self, items, line: int, column: int):
        super().__init__(items)
        self.line = line
        self.column = column


class _ToSexp(Transformer):
    def __init__(self, line_offset: int = 0):
        super().__init__()
        self.line_offset = line_offset

    def start(self, items):
        return SList(items, 1 + self.line_offset, 1)

    @v_args(meta=True)
    def list(self, meta, items):
        line = getattr(meta, "line", 0) if not getattr(meta, "empty", False) else 0
        column = getattr(meta, "column", 0) if not getattr(meta, "empty", False) else 0
        return SList(items, line + self.line_offset, column)

    def SYMBOL(self, token: Token):
        return SAtom(str(token), token.line + self.line_offset, token.column)

    def STRING(self, token: Token):
        return SAtom(str(token)[1:-1], token.line + self.line_offset, token.column + 1, quoted=True)


_sexp_parser = Lark(SEXP_GRAMMAR, parser="lalr", propagate_positions=True)


def read_sexps(text: str, source: Optional[str] = None, line_offset: int = 0) -> SList:
    """Parses text into a list of top-level s-expressions."""
    try:
        tree = _sexp_parser.parse(text)
    except UnexpectedEOF as e:
        raise PddlSyntaxError("unexpected end of input (unbalanced parentheses?)", source=source) from e
    except UnexpectedToken as e:
        if e.token.type == "$END":
            raise PddlSyntaxError("unexpected end of input (unbalanced parentheses?)", source=source) from e
        raise PddlSyntaxError(f"unexpected '{e.token}'", e.line + line_offset, e.column, source) from e
    except UnexpectedCharacters as e:
        raise PddlSyntaxError(f"unexpected character '{text[e.pos_in_stream]}'", e.line + line_offset, e.column, source) from e
    except UnexpectedInput as e:
        raise PddlSyntaxError(str(e), getattr(e, "line", None), getattr(e, "column", None), source) from e
    return _ToSexp(line_offset).transform(tree)


# --- helpers ---

def _pos(node) -> Tuple[Optional[int], Optional[int]]:
    return getattr(node, "line", None), getattr(node, "column", None)


def _syntax(message: str, node, source: Optional[str]) -> PddlSyntaxError:
    line, column = _pos(node)
    return PddlSyntaxError(message, line, column, source)


def _semantic(message: str, node, source: Optional[str]) -> PddlSemanticError:
    line, column = _pos(node)
    return PddlSemanticError(message, line, column, source)


def _unsupported(message: str, node, source: Optional[str]) -> UnsupportedFeatureError:
    line, column = _pos(node)
    where = f"{source + ':' if source else ''}{line}:{column}: " if line is not None else ""
    return UnsupportedFeatureError(f"{where}{message}")


def _head(node) -> Optional[str]:
    if isinstance(node, SList) and node and isinstance(node[0], SAtom):
        return node[0].lower()
    return None


def _expect_list(node, what: str, source: Optional[str]) -> SList:
    if not isinstance(node, SList):
        raise _syntax(f"expected {what}, found '{node}'", node, source)
    return node


def _expect_symbol(node, what: str, source: Optional[str]) -> SAtom:
    if not isinstance(node, SAtom) or node.quoted:
        raise _syntax(f"expected {what}", node, source)
    return node


def _expect_int(node, what: str, source: Optional[str]) -> int:
    symbol = _expect_symbol(node, what, source)
    try:
        return int(symbol)
    except ValueError:
        raise _syntax(f"expected integer {what}, found '{symbol}'", node, source) from None


def parse_typed_list(items: Sequence, source: Optional[str], allow_untyped: bool = False) -> List[Tuple[SAtom, str]]:
    """`a b - t c - u` -> [(a, t), (b, t), (c, u)]."""
    result: List[Tuple[SAtom, str]] = []
    pending: List[SAtom] = []
    i = 0
    while i < len(items):
        item = _expect_symbol(items[i], "name", source)
        if item == "-":
            if i + 1 >= len(items):
                raise _syntax("type expected after '-'", item, source)
            type_node = items[i + 1]
            if isinstance(type_node, SList):
                raise _unsupported("'either' types are not supported", type_node, source)
            type_name = _expect_symbol(type_node, "type name", source)
            if not pending:
                raise _syntax("'-' without names before it", item, source)
            result.extend((name, str(type_name)) for name in pending)
            pending = []
            i += 2
            continue
        pending.append(item)
        i += 1
    if pending:
        if not allow_untyped:
            raise _semantic(f"untyped name '{pending[0]}'", pending[0], source)
        result.extend((name, "object") for name in pending)
    return result


def _atom_from(node: SList, source: Optional[str]) -> Atom:
    predicate = _expect_symbol(node[0], "predicate name", source) if node else None
    if predicate is None:
        raise _syntax("empty atom '()'", node, source)
    if predicate.lower() in _UNSUPPORTED_CONNECTIVES:
        raise _unsupported(f"'{predicate}' is outside the supported subset", node, source)
    args = tuple(str(_expect_symbol(arg, "argument", source)) for arg in node[1:])
    return Atom(str(predicate), args)


def literal_from_sexp(node, source: Optional[str] = None) -> Literal:
    node = _expect_list(node, "literal", source)
    if _head(node) == "not":
        if len(node) != 2:
            raise _syntax("'not' takes exactly one atom", node, source)
        inner = _expect_list(node[1], "atom", source)
        if _head(inner) == "not":
            raise _unsupported("nested negation", inner, source)
        return Literal(_atom_from(inner, source), False)
    return Literal(_atom_from(node, source), True)


def parse_literal(text: str) -> Literal:
    """Parses `(pred a b)` or `(not (pred a b))`."""
    nodes = read_sexps(text)
    if len(nodes) != 1:
        raise PddlSyntaxError(f"expected exactly one literal in {text!r}")
    return literal_from_sexp(nodes[0])


def parse_atom(text: str) -> Atom:
    literal = parse_literal(text)
    if not literal.positive:
        raise PddlSyntaxError(f"expected a positive atom, found {text!r}")
    return literal.atom


def _conjuncts(node, source: Optional[str]) -> List:
    node = _expect_list(node, "formula", source)
    if _head(node) == "and":
        return list(node[1:])
    if not node:
        return []
    return [node]


class _SignatureChecker:
    def __init__(self, predicates: Mapping[str, Tuple[str, ...]], source: Optional[str]):
        self.predicates = predicates
        self.source = source

    def check(self, atom: Atom, node, variables: Mapping[str, str], objects: Mapping[str, str]) -> None:
        types = self.predicates.get(atom.predicate)
        if types is None:
            raise _semantic(f"unknown predicate '{atom.predicate}'", node, self.source)
        if len(types) != len(atom.args):
            raise _semantic(
                f"predicate '{atom.predicate}' takes {len(types)} arguments, got {len(atom.args)}", node, self.source
            )
        for arg, expected in zip(atom.args, types):
            if is_variable(arg):
                actual = variables.get(arg[1:])
                if actual is None:
                    raise _semantic(f"undeclared variable '{arg}'", node, self.source)
            else:
                actual = objects.get(arg)
                if actual is None:
                    raise _semantic(f"unknown object '{arg}'", node, self.source)
            if actual != expected:
                raise _semantic(
                    f"'{arg}' has type '{actual}' but '{atom.predicate}' expects '{expected}'", node, self.source
                )


# --- Domain ---

def _parse_action(node: SList, predicates, constants, types, durative: bool, source: Optional[str]) -> ActionSchema:
    name = _expect_symbol(node[1] if len(node) > 1 else node, "action name", source)
    fields: Dict[str, object] = {}
    i = 2
    while i < len(node):
        key = _expect_symbol(node[i], "action field", source).lower()
        if i + 1 >= len(node):
            raise _syntax(f"missing value for '{key}'", node[i], source)
        fields[key] = node[i + 1]
        i += 2

    params_node = _expect_list(fields.get(":parameters", SList([], node.line, node.column)), "parameter list", source)
    params: List[Param] = []
    for var, typ in parse_typed_list(params_node, source):
        if not is_variable(var):
            raise _syntax(f"parameter '{var}' must start with '?'", var, source)
        if typ not in types:
            raise _semantic(f"unknown type '{typ}'", var, source)
        params.append((var[1:], typ))
    variables = dict(params)
    checker = _SignatureChecker(predicates, source)

    if durative:
        if ":duration" not in fields:
            raise _syntax(f"durative action '{name}' needs :duration", node, source)
        dur_node = _expect_list(fields[":duration"], "(= ?duration N)", source)
        if len(dur_node) != 3 or _head(dur_node) != "=" or str(dur_node[1]) != "?duration":
            raise _unsupported("only fixed durations '(= ?duration N)' are supported", dur_node, source)
        duration = _expect_int(dur_node[2], "duration", source)
        cond_key, eff_key = ":condition", ":effect"
    else:
        duration = _expect_int(fields[":duration"], "duration", source) if ":duration" in fields else 1
        cond_key, eff_key = ":precondition", ":effect"
    if duration < 1:
        raise _semantic(f"duration of '{name}' must be at least 1 tick", node, source)

    precondition: List[Literal] = []
    distinct: List[Tuple[str, str]] = []
    for conj in _conjuncts(fields.get(cond_key, SList([], 0, 0)), source):
        conj = _expect_list(conj, "condition", source)
        if durative:
            if _head(conj) != "at" or len(conj) != 3 or str(conj[1]).lower() != "start":
                if _head(conj) in ("over", "at"):
                    raise _unsupported("only 'at start' conditions are supported", conj, source)
                raise _syntax("durative conditions must be wrapped in (at start ...)", conj, source)
            conj = _expect_list(conj[2], "literal", source)
        if _head(conj) == "not" and len(conj) == 2 and _head(conj[1]) == "=":
            eq = conj[1]
            if len(eq) != 3:
                raise _syntax("'=' takes two terms", eq, source)
            distinct.append((str(eq[1]), str(eq[2])))
            continue
        if _head(conj) == "=":
            raise _unsupported("positive equality is not supported", conj, source)
        literal = literal_from_sexp(conj, source)
        checker.check(literal.atom, conj, variables, constants)
        precondition.append(literal)

    adds: List[Atom] = []
    dels: List[Atom] = []
    for conj in _conjuncts(fields.get(eff_key, SList([], 0, 0)), source):
        conj = _expect_list(conj, "effect", source)
        if durative:
            if _head(conj) != "at" or len(conj) != 3 or str(conj[1]).lower() != "end":
                raise _unsupported("only 'at end' effects are supported", conj, source)
            conj = _expect_list(conj[2], "literal", source)
        literal = literal_from_sexp(conj, source)
        checker.check(literal.atom, conj, variables, constants)
        (adds if literal.positive else dels).append(literal.atom)

    return ActionSchema(str(name), tuple(params), tuple(precondition), tuple(adds), tuple(dels), duration, tuple(distinct))


def parse_domain(text: str, source: Optional[str] = None) -> Domain:
    nodes = read_sexps(text, source)
    if len(nodes) != 1 or _head(nodes[0]) != "define":
        raise _syntax("expected a single (define (domain ...) ...)", nodes[0] if nodes else nodes, source)
    root = nodes[0]
    header = _expect_list(root[1] if len(root) > 1 else root, "(domain NAME)", source)
    if _head(header) != "domain" or len(header) != 2:
        raise _syntax("expected (domain NAME)", header, source)
    name = str(header[1])

    types: List[str] = []
    constants: Dict[str, str] = {}
    predicates: Dict[str, Tuple[str, ...]] = {}
    actions: List[ActionSchema] = []
    action_names = set()

    for section in root[2:]:
        section = _expect_list(section, "domain section", source)
        key = _head(section)
        if key == ":requirements":
            for req in section[1:]:
                if str(req).lower() not in SUPPORTED_REQUIREMENTS:
                    raise _unsupported(f"requirement '{req}' is outside the supported subset", req, source)
        elif key == ":types":
            for type_name, parent in parse_typed_list(section[1:], source, allow_untyped=True):
                if parent != "object":
                    raise _unsupported(f"subtype '{type_name} - {parent}': only flat types are supported", type_name, source)
                if str(type_name) in types:
                    raise _semantic(f"duplicate type '{type_name}'", type_name, source)
                types.append(str(type_name))
        elif key == ":constants":
            for const, typ in parse_typed_list(section[1:], source):
                if typ not in types:
                    raise _semantic(f"unknown type '{typ}'", const, source)
                if str(const) in constants:
                    raise _semantic(f"duplicate constant '{const}'", const, source)
                constants[str(const)] = typ
        elif key == ":predicates":
            for pred in section[1:]:
                pred = _expect_list(pred, "predicate declaration", source)
                pname = _expect_symbol(pred[0] if pred else pred, "predicate name", source)
                if str(pname) in predicates:
                    raise _semantic(f"duplicate predicate '{pname}'", pname, source)
                arg_types = []
                for var, typ in parse_typed_list(pred[1:], source):
                    if typ not in types:
                        raise _semantic(f"unknown type '{typ}'", var, source)
                    arg_types.append(typ)
                predicates[str(pname)] = tuple(arg_types)
        elif key in (":action", ":durative-action"):
            schema = _parse_action(section, predicates, constants, types, key == ":durative-action", source)
            if schema.name in action_names:
                raise _semantic(f"duplicate action '{schema.name}'", section, source)
            action_names.add(schema.name)
            actions.append(schema)
        elif key in (":functions", ":derived", ":process", ":event"):
            raise _unsupported(f"'{key}' is outside the supported subset", section, source)
        else:
            raise _syntax(f"unknown domain section '{section[0] if section else '()'}'", section, source)

    logger.debug(f"Parsed domain '{name}' with {len(actions)} actions and {len(predicates)} predicates")
    return Domain(name, tuple(types), predicates, tuple(actions), constants)


# --- Problem ---

def parse_problem(text: str, domain: Optional[Domain] = None, source: Optional[str] = None) -> Problem:
    nodes = read_sexps(text, source)
    if len(nodes) != 1 or _head(nodes[0]) != "define":
        raise _syntax("expected a single (define (problem ...) ...)", nodes[0] if nodes else nodes, source)
    root = nodes[0]
    header = _expect_list(root[1] if len(root) > 1 else root, "(problem NAME)", source)
    if _head(header) != "problem" or len(header) != 2:
        raise _syntax("expected (problem NAME)", header, source)
    name = str(header[1])

    domain_name = domain.name if domain else ""
    objects: Dict[str, str] = dict(domain.constants) if domain else {}
    init: List[Atom] = []
    tils: List[Tuple[Time, Literal]] = []
    objective: List[Literal] = []
    checker = _SignatureChecker(domain.predicates, source) if domain else None
    deferred_checks = []

    for section in root[2:]:
        section = _expect_list(section, "problem section", source)
        key = _head(section)
        if key == ":domain":
            domain_name = str(section[1])
            if domain and domain_name != domain.name:
                raise _semantic(f"problem is for domain '{domain_name}', loaded '{domain.name}'", section, source)
        elif key == ":objects":
            for obj, typ in parse_typed_list(section[1:], source):
                if domain and typ not in domain.types:
                    raise _semantic(f"unknown type '{typ}'", obj, source)
                objects[str(obj)] = typ
        elif key == ":init":
            for fact in section[1:]:
                fact = _expect_list(fact, "initial fact", source)
                if _head(fact) == "at" and len(fact) == 3 and isinstance(fact[2], SList):
                    when = _expect_int(fact[1], "TIL time", source)
                    if when <= 0:
                        raise _semantic(f"TIL time must be positive, got {when}", fact, source)
                    literal = literal_from_sexp(fact[2], source)
                    tils.append((when, literal))
                    deferred_checks.append((literal.atom, fact))
                    continue
                if _head(fact) == "not":
                    raise _semantic("initial state may only contain positive atoms", fact, source)
                if _head(fact) == "=":
                    raise _unsupported("numeric fluents are not supported", fact, source)
                atom = _atom_from(fact, source)
                init.append(atom)
                deferred_checks.append((atom, fact))
        elif key == ":goal":
            for conj in _conjuncts(section[1] if len(section) > 1 else SList([], 0, 0), source):
                literal = literal_from_sexp(conj, source)
                objective.append(literal)
                deferred_checks.append((literal.atom, conj))
        elif key == ":metric":
            continue
        else:
            raise _syntax(f"unknown problem section '{section[0] if section else '()'}'", section, source)

    for atom, node in deferred_checks:
        if checker is not None:
            checker.check(atom, node, {}, objects)
        else:
            for arg in atom.args:
                if arg not in objects:
                    raise _semantic(f"unknown object '{arg}'", node, source)

    tils.sort(key=lambda til: (til[0], str(til[1])))
    return Problem(name, domain_name, objects, frozenset(init), tuple(tils), tuple(objective))


def emit_problem(
    state: TimedState,
    objective: Sequence[Literal],
    tils: Sequence[Tuple[Time, Literal]],
    objects: Mapping[str, str],
    domain_name: str = "xenonite",
    name: str = "expansion",
    skip_objects: Sequence[str] = (),
) -> str:
    by_type: Dict[str, List[str]] = {}
    for obj, typ in objects.items():
        if obj in skip_objects:
            continue
        by_type.setdefault(typ, []).append(obj)
    lines = [f"(define (problem {name})", f"  (:domain {domain_name})"]
    if by_type:
        groups = " ".join(f"{' '.join(sorted(objs))} - {typ}" for typ, objs in sorted(by_type.items()))
        lines.append(f"  (:objects {groups})")
    lines.append("  (:init")
    for atom in sorted(state.atoms, key=str):
        lines.append(f"    {atom}")
    for when, literal in sorted(tils, key=lambda til: (til[0], str(til[1]))):
        lines.append(f"    (at {when} {literal})")
    lines.append("  )")
    lines.append(f"  (:goal (and {' '.join(str(l) for l in objective)}))")
    lines.append(")")
    return "\n".join(lines) + "\n"


# --- Goal operators ---

GOP_FIELDS = {
    "class", "param-names", "param-types", "param-quantified", "lookahead-time", "preconditions",
    "objective", "promises", "est-duration", "resources", "priority", "agent-param",
}


def _formula_literals(node: SAtom, source: Optional[str]) -> List[Tuple[Optional[int], Literal, object]]:
    """Reads a quoted formula; returns (at-offset or None, literal, node) triples."""
    if not node.quoted:
        raise _syntax("formula must be a quoted string", node, source)
    inner = read_sexps(str(node), source, line_offset=node.line - 1)
    if not inner:
        return []
    if len(inner) != 1:
        raise _syntax("formula must be a single (and ...) expression", node, source)
    result = []
    for conj in _conjuncts(inner[0], source):
        conj = _expect_list(conj, "literal", source)
        if _head(conj) == "at" and len(conj) == 3 and isinstance(conj[2], SList):
            result.append((_expect_int(conj[1], "promise offset", source), literal_from_sexp(conj[2], source), conj))
        else:
            result.append((None, literal_from_sexp(conj, source), conj))
    return result


def parse_goal_operators(text: str, domain: Optional[Domain] = None, source: Optional[str] = None) -> List[GoalOperator]:
    operators: List[GoalOperator] = []
    seen = set()
    for node in read_sexps(text, source):
        node = _expect_list(node, "(goal-operator ...)", source)
        if _head(node) != "goal-operator":
            raise _syntax(f"expected goal-operator, found '{node[0] if node else '()'}'", node, source)
        fields: Dict[str, SList] = {}
        for field_node in node[1:]:
            field_node = _expect_list(field_node, "goal-operator field", source)
            key = _head(field_node)
            if key not in GOP_FIELDS:
                raise _syntax(f"unknown goal-operator field '{field_node[0] if field_node else '()'}'", field_node, source)
            if key in fields:
                raise _semantic(f"duplicate field '{key}'", field_node, source)
            fields[key] = field_node
        for required in ("class", "param-names", "param-types", "preconditions", "objective", "est-duration"):
            if required not in fields:
                raise _syntax(f"goal-operator is missing '{required}'", node, source)

        class_name = str(_expect_symbol(fields["class"][1], "class name", source))
        if class_name in seen:
            raise _semantic(f"duplicate goal class '{class_name}'", fields["class"], source)
        seen.add(class_name)

        names = [str(_expect_symbol(n, "parameter name", source)).lstrip("?") for n in fields["param-names"][1:]]
        param_types = [str(_expect_symbol(t, "parameter type", source)) for t in fields["param-types"][1:]]
        if len(names) != len(param_types):
            raise _semantic("param-names and param-types differ in length", fields["param-types"], source)
        if len(set(names)) != len(names):
            raise _semantic("duplicate parameter name", fields["param-names"], source)
        if domain is not None:
            for typ, type_node in zip(param_types, fields["param-types"][1:]):
                if typ not in domain.types:
                    raise ConfigurationError(f"{class_name}: unknown parameter type '{typ}' (line {type_node.line})")
        if "param-quantified" in fields and len(fields["param-quantified"]) > 1:
            raise _unsupported("param-quantified must be empty", fields["param-quantified"], source)
        params = tuple(zip(names, param_types))
        variables = dict(params)

        lookahead = _expect_int(fields["lookahead-time"][1], "lookahead time", source) if "lookahead-time" in fields else 0
        if lookahead < 0:
            raise _semantic("lookahead-time must be >= 0", fields["lookahead-time"], source)
        est_duration = _expect_int(fields["est-duration"][1], "est-duration", source)
        priority = _expect_int(fields["priority"][1], "priority", source) if "priority" in fields else 0

        def literals_of(key: str, allow_offsets: bool = False):
            if key not in fields:
                return []
            if len(fields[key]) != 2:
                raise _syntax(f"'{key}' takes one quoted formula", fields[key], source)
            entries = _formula_literals(fields[key][1], source)
            for offset, literal, lit_node in entries:
                if offset is not None and not allow_offsets:
                    raise _syntax(f"timed literal not allowed in '{key}'", lit_node, source)
                for arg in literal.atom.args:
                    if is_variable(arg) and arg[1:] not in variables:
                        raise ConfigurationError(
                            f"{class_name}: variable '{arg}' in {key} is not a parameter (line {lit_node.line})"
                        )
                if domain is not None:
                    _SignatureChecker(domain.predicates, source).check(literal.atom, lit_node, variables, domain.constants)
            return entries

        precondition = tuple(lit for _, lit, _ in literals_of("preconditions"))
        objective = tuple(lit for _, lit, _ in literals_of("objective"))
        templates = tuple(PromiseTemplate(lit, offset) for offset, lit, _ in literals_of("promises", allow_offsets=True))

        resources: List[str] = []
        for res in fields.get("resources", [None])[1:]:
            res_name = str(_expect_symbol(res, "resource", source))
            if is_variable(res_name) and res_name[1:] not in variables:
                raise ConfigurationError(f"{class_name}: resource '{res_name}' is not a parameter (line {res.line})")
            resources.append(res_name)

        agent_param = None
        if "agent-param" in fields:
            agent_param = str(_expect_symbol(fields["agent-param"][1], "agent parameter", source)).lstrip("?")
            if agent_param not in variables:
                raise ConfigurationError(f"{class_name}: agent-param '{agent_param}' is not a parameter")
        else:
            agent_param = next((n for n, t in params if t == "robot"), None)

        operators.append(GoalOperator(
            class_name=class_name,
            params=params,
            lookahead_time=lookahead,
            precondition=precondition,
            objective=objective,
            est_duration=est_duration,
            promise_templates=templates,
            required_resources=tuple(resources),
            priority=priority,
            agent_param=agent_param,
        ))
    logger.debug(f"Parsed {len(operators)} goal operators from {source or '<text>'}")
    return operators
