"""Parser for the scenario file format.

A scenario file is a list of ``key = value`` assignments and named
``section { ... }`` blocks, which may nest. Values are numbers, quoted
strings, bare words, ``true``/``false``, ``inf``/``-inf`` and bracketed
lists of values. ``#`` starts a comment.
"""
import ast
import math
from typing import Any, Dict, List, NamedTuple

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput

SCENARIO_GRAMMAR = r"""
start: item*

?item: assignment
     | block

assignment: NAME "=" value
block: NAME "{" item* "}"

?value: SIGNED_NUMBER -> number
      | ESCAPED_STRING -> string
      | TRUE -> true
      | FALSE -> false
      | INF -> inf
      | NAME -> word
      | "[" [value ("," value)* [","]] "]" -> array

TRUE: "true"
FALSE: "false"
INF.2: /[+-]?inf\b/
NAME: /[A-Za-z_][A-Za-z0-9_]*/
COMMENT: /#[^\n]*/

%import common.SIGNED_NUMBER
%import common.ESCAPED_STRING
%import common.WS
%ignore WS
%ignore COMMENT
"""

SCENARIO_PARSER = Lark(SCENARIO_GRAMMAR, parser="lalr")


class ScenarioParseError(ValueError):
    """A scenario file that does not follow the grammar.

    line is 1-based; 0 means the value came from the command line.
    """

    def __init__(self, message: str, line: int = 0, column: int = 0, context: str = ""):
        self.line = line
        self.column = column
        self.context = context
        super().__init__(message)


class Setting(NamedTuple):
    value: Any
    line: int


# Blocks are Settings whose value is a nested Section.
Section = Dict[str, Setting]


@v_args(inline=True)
class ScenarioTransformer(Transformer):
    def number(self, token):
        try:
            return int(token)
        except ValueError:
            return float(token)

    def string(self, token):
        return ast.literal_eval(str(token))

    def true(self, _):
        return True

    def false(self, _):
        return False

    def inf(self, token):
        return -math.inf if str(token).startswith("-") else math.inf

    def word(self, token):
        return str(token)

    def array(self, *values):
        return [value for value in values if value is not None]

    def assignment(self, name, value):
        return ("assign", str(name), name.line, value)

    def block(self, name, *items):
        return ("block", str(name), name.line, list(items))

    def start(self, *items):
        return list(items)


def _collect(items: List[tuple], path: str = "") -> Section:
    section: Section = {}
    for kind, name, line, payload in items:
        where = f"{path}.{name}" if path else name
        if name in section:
            raise ScenarioParseError(
                f"Line {line}: '{where}' is already set on line {section[name].line}", line
            )
        if kind == "assign":
            section[name] = Setting(payload, line)
        else:
            section[name] = Setting(_collect(payload, where), line)
    return section


def parse_scenario_text(text: str) -> Section:
    """Parses scenario text into nested dicts of Settings.

    Raises:
        ScenarioParseError: with the line, column and surrounding text of the
            first token the grammar rejects, or for a key set twice.
    """
    try:
        tree = SCENARIO_PARSER.parse(text)
    except UnexpectedInput as error:
        context = error.get_context(text).rstrip()
        raise ScenarioParseError(
            f"Line {error.line}, column {error.column}: unexpected input\n{context}",
            error.line,
            error.column,
            context,
        ) from error
    return _collect(ScenarioTransformer().transform(tree))
