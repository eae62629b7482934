"""Tokenizing C-like source into line-structured tokens.

Every byte sequence tokenizes: unknown characters become `other` tokens,
so even badly broken programs still produce a token grid.
"""

from linefix.lang import render_line, tokenize_line, tokenize_program

SOURCE = """\
int i , j ;
int n ;
char tmp , a , b ;
tmp = a ;
n = a . size ( ) ;"""

program = tokenize_program(SOURCE)
print(f"{program.line_count} lines, {program.token_count()} tokens\n")
for i, line in enumerate(program.lines, start=1):
    print(f"line {i}: " + "  ".join(f"{t.text}[{t.kind.value}]" for t in line))

print("\nmaximal munch keeps multi-char operators together:")
for text in ("x<<=1;", "a&&b||!c", 'printf("%d",a);'):
    tokens = tokenize_line(text)
    print(f"  {text!r:24s} -> {[t.text for t in tokens]}")

print("\nrendering is canonical single-space; content round-trips:")
line = tokenize_line("string tmp, a, b;")
rendered = render_line(line)
again = tokenize_line(rendered)
print(f"  {rendered!r}")
print(f"  round-trip ok: {[t.text for t in again] == [t.text for t in line]}")
