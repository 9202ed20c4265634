"""Recursive-descent parser for the Spider-style SQLite SELECT subset.

Supported: SELECT with DISTINCT, aliases, arithmetic, aggregates,
JOIN .. ON, WHERE, GROUP BY, HAVING, ORDER BY, LIMIT, nested subqueries,
IN / LIKE / BETWEEN / EXISTS / IS NULL predicates and UNION / INTERSECT /
EXCEPT. Anything else raises :class:`UnsupportedConstruct` (statement heads
like INSERT) or :class:`ParseError` (malformed input), both carrying the
byte offset of the offending token.
"""

from __future__ import annotations

from ..errors import ParseError, UnsupportedConstruct
from .lexer import Token, TokenType, tokenize
from .nodes import AstNode, NodeKind, SqlAst, leaf, node, star

_UNSUPPORTED_HEADS = {
    "INSERT", "UPDATE", "DELETE", "CREATE", "DROP", "ALTER", "REPLACE",
    "PRAGMA", "WITH",
}
_COMPARISONS = {"=", "!=", "<>", "<", "<=", ">", ">="}
_SET_OPS = {"UNION", "INTERSECT", "EXCEPT"}


def parse_sql(text: str) -> SqlAst:
    """Parse a single SELECT statement into a round-trippable tree."""
    tokens = tokenize(_strip_comments(text))
    parser = _Parser(tokens)
    head = parser.peek()
    if head.type is TokenType.KEYWORD and head.value in _UNSUPPORTED_HEADS:
        raise UnsupportedConstruct(
            f"{head.value} statements are outside the supported subset",
            head.offset,
        )
    root = parser.parse_query_expr()
    parser.accept_symbol(";")
    tail = parser.peek()
    if tail.type is not TokenType.EOF:
        raise ParseError(f"unexpected trailing input {tail.value!r}", tail.offset)
    return SqlAst(root)


def _strip_comments(text: str) -> str:
    out: list[str] = []
    i = 0
    in_string: str | None = None
    while i < len(text):
        ch = text[i]
        if in_string:
            out.append(ch)
            if ch == in_string:
                in_string = None
            i += 1
            continue
        if ch in ("'", '"'):
            in_string = ch
            out.append(ch)
            i += 1
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            i = len(text) if j < 0 else j
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i)
            # Replace with a space so byte offsets stay close to the input.
            out.append(" ")
            i = len(text) if j < 0 else j + 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[j]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type is not TokenType.EOF:
            self.pos += 1
        return tok

    def at_keyword(self, *names: str) -> bool:
        tok = self.peek()
        return tok.type is TokenType.KEYWORD and tok.value in names

    def accept_keyword(self, *names: str) -> Token | None:
        if self.at_keyword(*names):
            return self.take()
        return None

    def expect_keyword(self, name: str) -> Token:
        tok = self.accept_keyword(name)
        if tok is None:
            got = self.peek()
            raise ParseError(f"expected {name}, got {got.value or 'end of input'!r}",
                             got.offset)
        return tok

    def at_symbol(self, *symbols: str) -> bool:
        tok = self.peek()
        return tok.type is TokenType.SYMBOL and tok.value in symbols

    def accept_symbol(self, *symbols: str) -> Token | None:
        if self.at_symbol(*symbols):
            return self.take()
        return None

    def expect_symbol(self, symbol: str) -> Token:
        tok = self.accept_symbol(symbol)
        if tok is None:
            got = self.peek()
            raise ParseError(f"expected {symbol!r}, got {got.value or 'end of input'!r}",
                             got.offset)
        return tok

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.type is not TokenType.IDENT:
            raise ParseError(f"expected identifier, got {tok.value or 'end of input'!r}",
                             tok.offset)
        return self.take()

    # -- statements --------------------------------------------------------

    def parse_query_expr(self) -> AstNode:
        left = self._parse_set_operand()
        while self.at_keyword(*_SET_OPS):
            op_tok = self.take()
            op_name = op_tok.value
            if op_name == "UNION" and self.accept_keyword("ALL"):
                op_name = "UNION ALL"
            right = self._parse_set_operand()
            left = node(NodeKind.SET_OP, leaf(NodeKind.OPERATOR, op_name), left, right)
        return left

    def _parse_set_operand(self) -> AstNode:
        if self.accept_symbol("("):
            inner = self.parse_query_expr()
            self.expect_symbol(")")
            return inner
        return self.parse_select()

    def parse_select(self) -> AstNode:
        self.expect_keyword("SELECT")
        children: list[AstNode] = []
        if self.accept_keyword("DISTINCT"):
            children.append(leaf(NodeKind.OPERATOR, "DISTINCT"))
        self.accept_keyword("ALL")
        children.append(self._parse_select_item())
        while self.accept_symbol(","):
            children.append(self._parse_select_item())
        if self.at_keyword("FROM"):
            children.append(self._parse_from())
        if self.accept_keyword("WHERE"):
            children.append(node(NodeKind.WHERE, self.parse_expr()))
        if self.at_keyword("GROUP"):
            self.take()
            self.expect_keyword("BY")
            exprs = [self.parse_expr()]
            while self.accept_symbol(","):
                exprs.append(self.parse_expr())
            children.append(node(NodeKind.GROUP_BY, *exprs))
        if self.accept_keyword("HAVING"):
            children.append(node(NodeKind.HAVING, self.parse_expr()))
        if self.at_keyword("ORDER"):
            self.take()
            self.expect_keyword("BY")
            items = [self._parse_order_item()]
            while self.accept_symbol(","):
                items.append(self._parse_order_item())
            children.append(node(NodeKind.ORDER_BY, *items))
        if self.at_keyword("LIMIT"):
            tok = self.take()
            num = self.peek()
            if num.type is not TokenType.NUMBER:
                raise ParseError("LIMIT requires a number literal", num.offset or tok.offset)
            self.take()
            children.append(node(NodeKind.LIMIT, leaf(NodeKind.LITERAL, num.value)))
        return node(NodeKind.SELECT, *children)

    def _parse_select_item(self) -> AstNode:
        expr = self.parse_expr()
        return self._maybe_alias(expr, NodeKind.IDENTIFIER_COLUMN)

    def _maybe_alias(self, subject: AstNode, name_kind: NodeKind) -> AstNode:
        if self.accept_keyword("AS"):
            name = self.expect_ident()
            return node(NodeKind.ALIAS, subject, leaf(name_kind, name.value))
        if self.peek().type is TokenType.IDENT:
            name = self.take()
            return node(NodeKind.ALIAS, subject, leaf(name_kind, name.value))
        return subject

    def _parse_from(self) -> AstNode:
        self.expect_keyword("FROM")
        sources = [self._parse_table_source()]
        while self.at_keyword("JOIN", "INNER", "LEFT", "CROSS", "RIGHT", "FULL"):
            sources.append(self._parse_join())
        return node(NodeKind.FROM, *sources)

    def _parse_join(self) -> AstNode:
        join_type = None
        if self.accept_keyword("INNER"):
            pass  # INNER JOIN is canonicalized to plain JOIN
        elif self.accept_keyword("LEFT"):
            self.accept_keyword("OUTER")
            join_type = "LEFT JOIN"
        elif self.accept_keyword("CROSS"):
            join_type = "CROSS JOIN"
        elif self.at_keyword("RIGHT", "FULL"):
            tok = self.take()
            raise UnsupportedConstruct(f"{tok.value} JOIN is outside the supported subset",
                                       tok.offset)
        self.expect_keyword("JOIN")
        children: list[AstNode] = []
        if join_type is not None:
            children.append(leaf(NodeKind.OPERATOR, join_type))
        children.append(self._parse_table_source())
        if self.accept_keyword("ON"):
            children.append(node(NodeKind.ON, self.parse_expr()))
        return node(NodeKind.JOIN, *children)

    def _parse_table_source(self) -> AstNode:
        if self.accept_symbol("("):
            inner = self.parse_query_expr()
            self.expect_symbol(")")
            return self._maybe_alias(node(NodeKind.SUBQUERY, inner),
                                     NodeKind.IDENTIFIER_TABLE)
        name = self.expect_ident()
        source = leaf(NodeKind.IDENTIFIER_TABLE, name.value)
        return self._maybe_alias(source, NodeKind.IDENTIFIER_TABLE)

    def _parse_order_item(self) -> AstNode:
        expr = self.parse_expr()
        direction = self.accept_keyword("ASC", "DESC")
        if direction is not None:
            return node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, direction.value), expr)
        return expr

    # -- expressions -------------------------------------------------------

    def parse_expr(self) -> AstNode:
        return self._parse_or()

    def _parse_or(self) -> AstNode:
        left = self._parse_and()
        while self.accept_keyword("OR"):
            right = self._parse_and()
            left = node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, "OR"), left, right)
        return left

    def _parse_and(self) -> AstNode:
        left = self._parse_not()
        while self.accept_keyword("AND"):
            right = self._parse_not()
            left = node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, "AND"), left, right)
        return left

    def _parse_not(self) -> AstNode:
        if self.accept_keyword("NOT"):
            return node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, "NOT"),
                        self._parse_not())
        return self._parse_predicate()

    def _parse_predicate(self) -> AstNode:
        left = self._parse_additive()
        tok = self.peek()
        if tok.type is TokenType.SYMBOL and tok.value in _COMPARISONS:
            self.take()
            symbol = "!=" if tok.value == "<>" else tok.value
            right = self._parse_additive()
            return node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, symbol), left, right)
        negated = False
        if self.at_keyword("NOT") and self.peek(1).type is TokenType.KEYWORD \
                and self.peek(1).value in ("IN", "LIKE", "BETWEEN"):
            self.take()
            negated = True
        if self.accept_keyword("BETWEEN"):
            low = self._parse_additive()
            self.expect_keyword("AND")
            high = self._parse_additive()
            op_name = "NOT BETWEEN" if negated else "BETWEEN"
            return node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, op_name),
                        left, low, high)
        if self.accept_keyword("IN"):
            self.expect_symbol("(")
            args = self._parse_in_body()
            self.expect_symbol(")")
            op_name = "NOT IN" if negated else "IN"
            return node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, op_name),
                        left, *args)
        if self.accept_keyword("LIKE"):
            right = self._parse_additive()
            op_name = "NOT LIKE" if negated else "LIKE"
            return node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, op_name),
                        left, right)
        if negated:
            got = self.peek()
            raise ParseError("expected IN, LIKE or BETWEEN after NOT", got.offset)
        if self.at_keyword("IS"):
            self.take()
            is_not = self.accept_keyword("NOT") is not None
            self.expect_keyword("NULL")
            op_name = "IS NOT NULL" if is_not else "IS NULL"
            return node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, op_name), left)
        return left

    def _parse_in_body(self) -> list[AstNode]:
        if self.at_keyword("SELECT") or self._parens_hide_select():
            return [node(NodeKind.SUBQUERY, self.parse_query_expr())]
        args = [self.parse_expr()]
        while self.accept_symbol(","):
            args.append(self.parse_expr())
        return args

    def _parens_hide_select(self) -> bool:
        ahead = 0
        while self.peek(ahead).type is TokenType.SYMBOL and self.peek(ahead).value == "(":
            ahead += 1
        tok = self.peek(ahead)
        return ahead > 0 and tok.type is TokenType.KEYWORD and tok.value == "SELECT"

    def _parse_additive(self) -> AstNode:
        left = self._parse_multiplicative()
        while self.at_symbol("+", "-"):
            op_tok = self.take()
            right = self._parse_multiplicative()
            left = node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, op_tok.value),
                        left, right)
        return left

    def _parse_multiplicative(self) -> AstNode:
        left = self._parse_unary()
        while self.at_symbol("*", "/"):
            op_tok = self.take()
            right = self._parse_unary()
            left = node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, op_tok.value),
                        left, right)
        return left

    def _parse_unary(self) -> AstNode:
        if self.accept_symbol("-"):
            return node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, "-"),
                        self._parse_unary())
        if self.accept_symbol("+"):
            return self._parse_unary()
        return self._parse_atom()

    def _parse_atom(self) -> AstNode:
        tok = self.peek()
        if tok.type is TokenType.NUMBER:
            self.take()
            return leaf(NodeKind.LITERAL, tok.value)
        if tok.type is TokenType.STRING:
            self.take()
            return leaf(NodeKind.LITERAL, tok.value)
        if self.at_keyword("NULL"):
            self.take()
            return leaf(NodeKind.LITERAL, "NULL")
        if self.at_symbol("*"):
            self.take()
            return star()
        if self.at_keyword("EXISTS"):
            self.take()
            self.expect_symbol("(")
            inner = self.parse_query_expr()
            self.expect_symbol(")")
            return node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, "EXISTS"),
                        node(NodeKind.SUBQUERY, inner))
        if self.accept_symbol("("):
            if self.at_keyword("SELECT") or self._parens_hide_select():
                inner = node(NodeKind.SUBQUERY, self.parse_query_expr())
            else:
                inner = self.parse_expr()
            self.expect_symbol(")")
            return inner
        if tok.type is TokenType.IDENT:
            self.take()
            if self.at_symbol("("):
                return self._parse_call(tok.value)
            if self.accept_symbol("."):
                if self.accept_symbol("*"):
                    return star(f"{tok.value}.*")
                member = self.expect_ident()
                return leaf(NodeKind.IDENTIFIER_COLUMN, f"{tok.value}.{member.value}")
            return leaf(NodeKind.IDENTIFIER_COLUMN, tok.value)
        raise ParseError(f"unexpected token {tok.value or 'end of input'!r}", tok.offset)

    def _parse_call(self, name: str) -> AstNode:
        self.expect_symbol("(")
        children: list[AstNode] = [leaf(NodeKind.OPERATOR, name.upper())]
        if self.accept_symbol("*"):
            children.append(star())
        else:
            distinct = self.accept_keyword("DISTINCT") is not None
            arg = self.parse_expr()
            if distinct:
                arg = node(NodeKind.FUNCTION, leaf(NodeKind.OPERATOR, "DISTINCT"), arg)
            children.append(arg)
            while self.accept_symbol(","):
                children.append(self.parse_expr())
        self.expect_symbol(")")
        return node(NodeKind.FUNCTION, *children)
