"""Text to statements: preprocessing, tokens, parsing and formula rendering."""

from .lexer import Token, tokenize
from .nodes import Formula
from .parser import Parser, parse_expression, parse_formula, parse_program, parse_statement, split_statements
from .preprocess import Preprocessor, preprocess
from .render import format_number, render_formula

__all__ = [
    "Formula", "Parser", "Preprocessor", "Token", "format_number", "parse_expression",
    "parse_formula", "parse_program", "parse_statement", "preprocess", "render_formula",
    "split_statements", "tokenize",
]
