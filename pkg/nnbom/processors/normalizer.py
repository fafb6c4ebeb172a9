"""Normalisation des modules NN pour la détection de clones de type 1 et 2.

Trois règles sont appliquées au flux de jetons de la classe :
suppression (commentaires, espaces, lignes vides), renommage positionnel
(variables locales et fonctions imbriquées en V1, V2... ; attributs `self.x`
en A1, A2... ; nom de la classe en CLASS) et remplacement des littéraux
(NUM, STR ; une concaténation implicite de chaînes donne un seul STR).
Les mots-clés, `self`, les noms de méthodes et les noms externes pointés
sont conservés.
"""

import ast
import hashlib
import io
import keyword
import textwrap
import tokenize
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple, Union

_SKIPPED = {
    tokenize.COMMENT, tokenize.NL, tokenize.NEWLINE, tokenize.INDENT,
    tokenize.DEDENT, tokenize.ENCODING, tokenize.ENDMARKER,
}
# Jetons f-string découpés (Python 3.12+)
_FSTRING_START = getattr(tokenize, "FSTRING_START", None)
_FSTRING_END = getattr(tokenize, "FSTRING_END", None)


class NormalizationError(ValueError):
    """Source de module impossible à découper en jetons."""


@dataclass(frozen=True)
class NormalizedForm:
    tokens: Tuple[str, ...]

    @property
    def canonical_text(self) -> str:
        return " ".join(self.tokens)


def _bound_names(tree: ast.AST) -> Set[str]:
    """Noms liés localement : paramètres, cibles d'affectation, boucles, except/with."""
    names: Set[str] = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.arg):
            names.add(node.arg)
        elif isinstance(node, ast.Name) and isinstance(node.ctx, (ast.Store, ast.Del)):
            names.add(node.id)
        elif isinstance(node, ast.ExceptHandler) and node.name:
            names.add(node.name)
    names.discard("self")
    return names


def _nested_definitions(class_node: ast.ClassDef) -> Set[str]:
    """Fonctions et classes définies dans le corps des méthodes."""
    names: Set[str] = set()
    for method in class_node.body:
        if not isinstance(method, (ast.FunctionDef, ast.AsyncFunctionDef)):
            continue
        for node in ast.walk(method):
            if node is not method and isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                names.add(node.name)
    return names


def _continues_string(tokens: List[Tuple[int, str]], statement_break: bool) -> bool:
    """Concaténation implicite : 'a' 'b' forme une seule chaîne."""
    return not statement_break and bool(tokens) and tokens[-1][0] == tokenize.STRING


def _significant_tokens(text: str) -> List[Tuple[int, str]]:
    tokens: List[Tuple[int, str]] = []
    fstring_depth = 0
    statement_break = False
    for tok in tokenize.generate_tokens(io.StringIO(text).readline):
        if _FSTRING_START is not None and tok.type == _FSTRING_START:
            fstring_depth += 1
            continue
        if fstring_depth:
            if tok.type == _FSTRING_END:
                fstring_depth -= 1
                if fstring_depth == 0:
                    if not _continues_string(tokens, statement_break):
                        tokens.append((tokenize.STRING, "STR"))
                    statement_break = False
            continue
        if tok.type in (tokenize.NEWLINE, tokenize.INDENT, tokenize.DEDENT):
            statement_break = True
        if tok.type in _SKIPPED:
            continue
        if tok.type == tokenize.ERRORTOKEN:
            if not tok.string.strip():
                continue
            raise NormalizationError(f"jeton invalide '{tok.string}' ligne {tok.start[0]}")
        if tok.type != tokenize.STRING or not _continues_string(tokens, statement_break):
            tokens.append((tok.type, tok.string))
        statement_break = False
    return tokens


def normalize(source: Union[str, bytes]) -> NormalizedForm:
    """Forme normalisée d'une définition de classe."""
    if isinstance(source, bytes):
        source = source.decode("utf-8", errors="replace")
    text = textwrap.dedent(source)

    try:
        tree = ast.parse(text)
        significant = _significant_tokens(text)
    except (SyntaxError, ValueError, tokenize.TokenError) as e:
        raise NormalizationError(str(e)) from e

    class_node = next((n for n in tree.body if isinstance(n, ast.ClassDef)), None)
    class_name = class_node.name if class_node else None
    methods: Set[str] = set()
    nested: Set[str] = set()
    if class_node is not None:
        methods = {
            n.name for n in class_node.body if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef))
        }
        nested = _nested_definitions(class_node) - methods
    bound = (_bound_names(tree) | nested) - {class_name}

    variables: Dict[str, str] = {}
    attributes: Dict[str, str] = {}
    brackets: List[str] = []
    out: List[str] = []

    for index, (ttype, string) in enumerate(significant):
        prev = significant[index - 1][1] if index >= 1 else ""
        prev2 = significant[index - 2][1] if index >= 2 else ""
        following = significant[index + 1][1] if index + 1 < len(significant) else ""

        if ttype == tokenize.NUMBER:
            out.append("NUM")
        elif ttype == tokenize.STRING:
            out.append("STR")
        elif ttype == tokenize.OP:
            if string in "([{":
                if string == "(" and prev2 == "def":
                    brackets.append("def")
                elif string == "(" and (prev in (")", "]") or (prev.isidentifier() and not keyword.iskeyword(prev))):
                    brackets.append("call")
                else:
                    brackets.append("other")
            elif string in ")]}" and brackets:
                brackets.pop()
            out.append(string)
        elif ttype == tokenize.NAME:
            out.append(_rename(
                string, prev, prev2, following, brackets, class_name, methods, bound, variables, attributes,
            ))
        else:
            out.append(string)

    if not out:
        raise NormalizationError("source vide")
    return NormalizedForm(tuple(out))


def _rename(
    name: str,
    prev: str,
    prev2: str,
    following: str,
    brackets: List[str],
    class_name: Optional[str],
    methods: Set[str],
    bound: Set[str],
    variables: Dict[str, str],
    attributes: Dict[str, str],
) -> str:
    if prev == ".":
        if prev2 == "self" and name not in methods:
            return attributes.setdefault(name, f"A{len(attributes) + 1}")
        return name
    if keyword.iskeyword(name) or name == "self":
        return name
    if name == class_name:
        return "CLASS"
    # Nom d'argument nommé dans un appel : fait partie de l'API appelée
    if following == "=" and brackets and brackets[-1] == "call":
        return name
    if name in bound:
        return variables.setdefault(name, f"V{len(variables) + 1}")
    return name


def module_hash(form: NormalizedForm) -> str:
    """SHA-256 hexadécimal du texte canonique."""
    if not form.tokens:
        raise ValueError("forme normalisée vide")
    return hashlib.sha256(form.canonical_text.encode("utf-8")).hexdigest()
