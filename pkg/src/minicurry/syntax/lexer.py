from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError, Pos

KEYWORDS = {"data", "deriving", "where", "free", "let", "in", "instance", "class"}
RESERVED_OPS = {"=", "|", "::", "->", "=>", "\\", "..", "@", "~"}
SYMBOL_CHARS = set("!#$%&*+./<=>?@\\^|-~:")
SPECIALS = set("()[],;`{}")

ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "0": "\0", "\\": "\\", "'": "'", '"': '"'}


@dataclass
class Token:
    kind: str  # VARID CONID INT CHAR STRING OP RESERVED SPECIAL KEYWORD EOF
    value: object
    line: int
    col: int
    bol: bool = False  # first token on its line

    def pos(self, file: str) -> Pos:
        return Pos(self.line, self.col, file)

    def __repr__(self):
        return f"<{self.kind} {self.value!r} @{self.line}:{self.col}>"


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(text)
    line, col = 1, 1
    bol = True

    def err(msg):
        raise ParseError(msg, Pos(line, col, file))

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            bol = True
            continue
        if c in " \t\r":
            i += 1
            col += 4 - (col - 1) % 4 if c == "\t" else 1
            continue
        if text.startswith("{-", i):
            depth = 0
            while i < n:
                if text.startswith("{-", i):
                    depth += 1
                    i += 2
                    col += 2
                elif text.startswith("-}", i):
                    depth -= 1
                    i += 2
                    col += 2
                    if depth == 0:
                        break
                elif text[i] == "\n":
                    i += 1
                    line += 1
                    col = 1
                else:
                    i += 1
                    col += 1
            else:
                err("unterminated block comment")
            continue
        start_line, start_col = line, col
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            if word in KEYWORDS:
                kind = "KEYWORD"
            elif word[0].isupper():
                kind = "CONID"
            else:
                kind = "VARID"
            tok = Token(kind, word, start_line, start_col, bol)
            col += j - i
            i = j
        elif c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tok = Token("INT", int(text[i:j]), start_line, start_col, bol)
            col += j - i
            i = j
        elif c == "'":
            j = i + 1
            if j < n and text[j] == "\\":
                if j + 1 >= n or text[j + 1] not in ESCAPES:
                    err("bad character escape")
                ch = ESCAPES[text[j + 1]]
                j += 2
            elif j < n and text[j] != "\n":
                ch = text[j]
                j += 1
            else:
                err("bad character literal")
            if j >= n or text[j] != "'":
                err("unterminated character literal")
            j += 1
            tok = Token("CHAR", ch, start_line, start_col, bol)
            col += j - i
            i = j
        elif c == '"':
            j = i + 1
            chars = []
            while True:
                if j >= n or text[j] == "\n":
                    err("unterminated string literal")
                if text[j] == '"':
                    j += 1
                    break
                if text[j] == "\\":
                    if j + 1 >= n or text[j + 1] not in ESCAPES:
                        err("bad string escape")
                    chars.append(ESCAPES[text[j + 1]])
                    j += 2
                else:
                    chars.append(text[j])
                    j += 1
            tok = Token("STRING", "".join(chars), start_line, start_col, bol)
            col += j - i
            i = j
        elif c in SPECIALS:
            tok = Token("SPECIAL", c, start_line, start_col, bol)
            i += 1
            col += 1
        elif c in SYMBOL_CHARS:
            j = i
            while j < n and text[j] in SYMBOL_CHARS:
                j += 1
            sym = text[i:j]
            if len(sym) >= 2 and set(sym) == {"-"}:
                # line comment
                while i < n and text[i] != "\n":
                    i += 1
                continue
            kind = "RESERVED" if sym in RESERVED_OPS else "OP"
            tok = Token(kind, sym, start_line, start_col, bol)
            col += j - i
            i = j
        else:
            err(f"unexpected character {c!r}")
        toks.append(tok)
        bol = False
    toks.append(Token("EOF", None, line, col, True))
    return toks
