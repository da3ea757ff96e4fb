import unittest

from utils.errors import InvalidTypeError, LevelError, SyntaxParseError
from utils.syntax import format_relation, free_holes, parse_relation, parse_type
from utils.type_system import (
    Arrow, CONTINUUM, Excl, NAT, Product, RelAtom, RelKind, Sum, TypesLevel, des, format_type, ind1,
    ind1_index, level1_constructor, level_of, type_code,
)


def level0_types(max_constructors):
    """Все типы уровня 0 не более чем с max_constructors конструкторами"""
    by_size = [[NAT, CONTINUUM]]
    for size in range(1, max_constructors + 1):
        current = []
        for left_size in range(size):
            for left in by_size[left_size]:
                for right in by_size[size - 1 - left_size]:
                    current.extend([Product(left, right), Sum(left, right), Arrow((left,), (right,))])
        by_size.append(current)
    return [t for group in by_size for t in group]


class TestInd1Enumeration(unittest.TestCase):
    def test_first_types(self):
        self.assertEqual(ind1(1), NAT)
        self.assertEqual(ind1(2), CONTINUUM)
        self.assertEqual(ind1(3), Product(NAT, NAT))
        self.assertEqual(ind1(7), Sum(NAT, NAT))
        self.assertEqual(ind1(11), Arrow((NAT,), (NAT,)))
        self.assertEqual(ind1(15), Product(NAT, Product(NAT, NAT)))

    def test_index_is_inverse(self):
        for n in range(1, 200):
            with self.subTest(n=n):
                self.assertEqual(ind1_index(ind1(n)), n)

    def test_codes_are_injective(self):
        codes = [type_code(ind1(n)) for n in range(1, 301)]
        self.assertEqual(len(set(codes)), len(codes))

    def test_first_ten_thousand_are_distinct(self):
        types = [ind1(n) for n in range(1, 10_001)]
        self.assertEqual(len(set(types)), len(types))
        self.assertEqual(len({type_code(t) for t in types}), len(types))

    def test_small_types_are_enumerated(self):
        expected = level0_types(3)
        self.assertEqual(len(expected), 2 + 12 + 144 + 2160)
        for t in expected:
            n = ind1_index(t)
            self.assertLessEqual(n, len(expected))
            self.assertEqual(ind1(n), t)
        self.assertEqual({ind1(n) for n in range(1, len(expected) + 1)}, set(expected))

    def test_zero_index_rejected(self):
        with self.assertRaises(InvalidTypeError):
            ind1(0)

    def test_types_level_has_no_code(self):
        with self.assertRaises(LevelError):
            type_code(TypesLevel(0))


class TestLevels(unittest.TestCase):
    def test_level_of(self):
        self.assertEqual(level_of(NAT), 0)
        self.assertEqual(level_of(Sum(NAT, CONTINUUM)), 0)
        self.assertEqual(level_of(TypesLevel(0)), 1)
        self.assertEqual(level_of(Arrow((NAT,), (TypesLevel(1),))), 2)
        self.assertEqual(level_of(RelAtom(RelKind.EQUAL, 1, 2)), 1)

    def test_des(self):
        self.assertEqual(des(Sum(NAT, CONTINUUM)), (NAT, CONTINUUM))
        self.assertEqual(des(NAT), (NAT, NAT))
        self.assertEqual(des(Arrow((NAT, NAT), (CONTINUUM,))), (Product(NAT, NAT), CONTINUUM))
        with self.assertRaises(LevelError):
            des(TypesLevel(0))

    def test_level1_constructor(self):
        self.assertEqual(level1_constructor("x", NAT, CONTINUUM, level=1), Product(NAT, CONTINUUM))
        self.assertEqual(level1_constructor("->", NAT, NAT), Arrow((NAT,), (NAT,)))
        self.assertEqual(level1_constructor("||", NAT, NAT), Excl(NAT, NAT))
        with self.assertRaises(LevelError):
            level1_constructor("x", TypesLevel(0), NAT, level=1)
        with self.assertRaises(InvalidTypeError):
            level1_constructor("?", NAT, NAT)

    def test_relation_arguments_are_natural(self):
        with self.assertRaises(InvalidTypeError):
            RelAtom(RelKind.EQUAL, 0, 1)

    def test_arrow_needs_sockets(self):
        with self.assertRaises(InvalidTypeError):
            Arrow((), (NAT,))


class TestSyntax(unittest.TestCase):
    def test_parse_types(self):
        self.assertEqual(parse_type("(N x (N + C))"), Product(NAT, Sum(NAT, CONTINUUM)))
        self.assertEqual(parse_type("(N; N -> N)"), Arrow((NAT, NAT), (NAT,)))
        self.assertEqual(parse_type("(N || C)"), Excl(NAT, CONTINUUM))
        self.assertEqual(parse_type("Types1"), TypesLevel(1))
        self.assertEqual(parse_type("(N → N)"), Arrow((NAT,), (NAT,)))

    def test_format_is_parsed_back(self):
        for n in range(1, 60):
            with self.subTest(n=n):
                self.assertEqual(parse_type(format_type(ind1(n))), ind1(n))

    def test_relation_templates(self):
        self.assertEqual(parse_relation("eq(1;2)"), RelAtom(RelKind.EQUAL, 1, 2))
        self.assertEqual(free_holes(parse_relation("and(gt(_2;_1);lt(_1;5))")), (1, 2))
        self.assertEqual(format_relation(parse_relation("pi[v;3](gt(v;_1))")), "pi[v;3](gt(v;_1))")

    def test_syntax_errors(self):
        for text in ("(N x", "N N", "eq(1)", "pi[v](eq(w;1))", "$"):
            with self.subTest(text=text):
                with self.assertRaises(SyntaxParseError):
                    parse_type(text)


if __name__ == '__main__':
    unittest.main()
