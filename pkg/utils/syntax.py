"""
Текстовый синтаксис типов и отношений для командной строки и файлов графов.

Типы:      N, C, Types0, (T x T), (T + T), (T || T), (T1; T2 -> T3; T4)
Отношения: eq(x;y), lt(x;y), gt(x;y), not(R), and(R;R), or(R;R),
           pi[v;10](R), sigma[v](R); _1, _2 - параметры шаблона.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Optional

from utils.errors import SyntaxParseError
from utils.type_system import (
    Arrow, CONTINUUM, Excl, Hole, NAT, Neg, Product, RelAtom, RelKind, Sum, TypeExpr, TypesLevel, format_type,
)

_TOKEN = re.compile(r"\s*(->|\|\||_-?\d+|\d+|[A-Za-z][A-Za-z0-9]*|[()\[\];+×→])")

_RELATIONS = {kind.value: kind for kind in RelKind}
_BINARY = {"x": Product, "×": Product, "+": Sum, "||": Excl}


@dataclass(frozen=True)
class Quantified:
    """Квантор в шаблоне отношения; связанная переменная - Hole(index < 0)"""
    which: str
    var: str
    index: int
    bound: Optional[int]
    body: Any


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise SyntaxParseError(f"неожиданный символ в позиции {pos}: {text[pos:pos + 10]!r}")
        token = match.group(1)
        tokens.append({"×": "x", "→": "->"}.get(token, token))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.scopes = []

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        token = self.peek()
        if token is None:
            raise SyntaxParseError(f"неожиданный конец выражения: {self.text!r}")
        if expected is not None and token != expected:
            raise SyntaxParseError(f"ожидалось '{expected}', получено '{token}' в {self.text!r}")
        self.pos += 1
        return token

    def parse(self):
        result = self.expr()
        if self.peek() is not None:
            raise SyntaxParseError(f"лишний текст после выражения: '{self.peek()}' в {self.text!r}")
        return result

    def expr(self):
        token = self.take()
        if token == "N":
            return NAT
        if token == "C":
            return CONTINUUM
        if token.startswith("Types") and token[5:].isdigit():
            return TypesLevel(int(token[5:]))
        if token in _RELATIONS:
            self.take("(")
            lhs = self.argument()
            self.take(";")
            rhs = self.argument()
            self.take(")")
            return RelAtom(_RELATIONS[token], lhs, rhs)
        if token == "not":
            self.take("(")
            body = self.expr()
            self.take(")")
            return Neg(body)
        if token in ("and", "or"):
            self.take("(")
            left = self.expr()
            self.take(";")
            right = self.expr()
            self.take(")")
            return Product(left, right) if token == "and" else Sum(left, right)
        if token in ("pi", "sigma"):
            return self.quantifier(token)
        if token == "(":
            return self.group()
        raise SyntaxParseError(f"неизвестный токен '{token}' в {self.text!r}")

    def group(self):
        first = self.expr()
        token = self.peek()
        if token in _BINARY:
            self.take()
            second = self.expr()
            self.take(")")
            return _BINARY[token](first, second)
        if token == ")":
            self.take()
            return first
        inputs = [first]
        while self.peek() == ";":
            self.take()
            inputs.append(self.expr())
        self.take("->")
        outputs = [self.expr()]
        while self.peek() == ";":
            self.take()
            outputs.append(self.expr())
        self.take(")")
        return Arrow(tuple(inputs), tuple(outputs))

    def quantifier(self, which: str) -> Quantified:
        self.take("[")
        var = self.take()
        if not var.isalpha() or var in _RELATIONS:
            raise SyntaxParseError(f"некорректное имя переменной '{var}'")
        bound = None
        if self.peek() == ";":
            self.take()
            bound = self.integer()
        self.take("]")
        index = -(len(self.scopes) + 1)
        self.scopes.append((var, index))
        self.take("(")
        body = self.expr()
        self.take(")")
        self.scopes.pop()
        return Quantified(which, var, index, bound, body)

    def integer(self) -> int:
        token = self.take()
        if not token.isdigit():
            raise SyntaxParseError(f"ожидалось число, получено '{token}'")
        return int(token)

    def argument(self):
        token = self.take()
        if token.isdigit():
            return int(token)
        if token.startswith("_"):
            return Hole(int(token[1:]))
        for var, index in reversed(self.scopes):
            if var == token:
                return Hole(index)
        raise SyntaxParseError(f"неизвестная переменная '{token}' в {self.text!r}")


@lru_cache(maxsize=512)
def parse_type(text: str):
    """Разбор типа или шаблона отношения"""
    return _Parser(text).parse()


def parse_relation(text: str):
    return parse_type(text)


def free_holes(template) -> tuple:
    """Параметры шаблона (_1, _2, ...) в порядке возрастания"""
    found = set()

    def walk(node):
        if isinstance(node, RelAtom):
            found.update(s.index for s in (node.lhs, node.rhs) if isinstance(s, Hole) and s.index > 0)
        elif isinstance(node, (Product, Sum)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Neg):
            walk(node.body)
        elif isinstance(node, Quantified):
            walk(node.body)

    walk(template)
    return tuple(sorted(found))


def format_relation(template, names: Optional[dict] = None) -> str:
    """Обратное к parse_relation представление шаблона"""
    names = dict(names or {})

    def slot(value):
        if isinstance(value, Hole):
            return names.get(value.index, str(value))
        return str(value)

    if isinstance(template, RelAtom):
        return f"{template.kind.value}({slot(template.lhs)};{slot(template.rhs)})"
    if isinstance(template, Product):
        return f"and({format_relation(template.left, names)};{format_relation(template.right, names)})"
    if isinstance(template, Sum):
        return f"or({format_relation(template.left, names)};{format_relation(template.right, names)})"
    if isinstance(template, Neg):
        return f"not({format_relation(template.body, names)})"
    if isinstance(template, Quantified):
        names[template.index] = template.var
        bound = f";{template.bound}" if template.bound is not None else ""
        return f"{template.which}[{template.var}{bound}]({format_relation(template.body, names)})"
    if isinstance(template, TypeExpr):
        return format_type(template)
    raise SyntaxParseError(f"не является шаблоном отношения: {template!r}")
