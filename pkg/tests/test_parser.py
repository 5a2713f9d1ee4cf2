import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seriesval.cli.parser import BigO, BinOp, Gen, Neg, Num, ParseError, Pow, Var, names_in, parse, to_text


def test_sum_node():
    node = parse("X1 + X2^2")
    assert node == BinOp("+", Var("X1"), Pow(Var("X2"), 2))


def test_series_literal():
    node = parse("t + u*t^2 + O(9)")
    assert node.right == BigO(9)
    assert names_in(node) == ["u"]


def test_unclosed_paren_column():
    with pytest.raises(ParseError) as e:
        parse("X1 + (")
    assert (e.value.line, e.value.column) == (1, 6)
    assert "column 6" in str(e.value)


def test_error_positions():
    with pytest.raises(ParseError) as e:
        parse("X1 + * X2")
    assert e.value.column == 6
    with pytest.raises(ParseError) as e:
        parse("X1 $ X2")
    assert e.value.column == 4
    with pytest.raises(ParseError) as e:
        parse("X1 +\n  (X2")
    assert (e.value.line, e.value.column) == (2, 3)


def test_negative_exponent_and_primes():
    assert parse("u'^(-2)") == Pow(Gen("u'"), -2)
    assert parse("u3_1*t") == BinOp("*", Gen("u3_1"), Var("t"))


def test_precedence():
    assert parse("a - b - c") == BinOp("-", BinOp("-", Gen("a"), Gen("b")), Gen("c"))
    assert parse("-a^2") == Neg(Pow(Gen("a"), 2))
    assert parse("a/b*c") == BinOp("*", BinOp("/", Gen("a"), Gen("b")), Gen("c"))


def test_minimal_parentheses():
    assert to_text(parse("(a + b) - (c - d)")) == "a + b - (c - d)"
    assert to_text(parse("((a*b))^2")) == "(a*b)^2"


_gen_names = st.sampled_from(["u", "u'", "u2", "y", "u3_1", "a_b''"])
_var_names = st.sampled_from(["X1", "X2", "X13", "t"])
_leaves = st.one_of(
    st.integers(0, 99).map(Num),
    _var_names.map(Var),
    _gen_names.map(Gen),
    st.integers(1, 20).map(BigO),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.builds(Pow, children, st.integers(-4, 5)),
        st.builds(BinOp, st.sampled_from("+-*/"), children, children),
    )


trees = st.recursive(_leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(trees)
def test_print_parse_round_trip(tree):
    text = to_text(tree)
    assert parse(text) == tree
    assert to_text(parse(text)) == text
