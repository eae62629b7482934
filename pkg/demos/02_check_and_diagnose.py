"""The built-in checker: GCC-style first-error diagnostics, hermetically.

The same parsing/categorization machinery also consumes real compiler
output (see the external evaluator in linefix.evaluator).
"""

from linefix.diagnostics import categorize, extract_arguments
from linefix.evaluator import mini_check
from linefix.lang import program_from_lines

BROKEN_PROGRAMS = [
    ["int a ;", "a = 1"],                          # missing ';'
    ["a = 1 ;"],                                   # undeclared
    ["int a ;", "int a ;"],                        # redeclaration
    ["char a ;", "int n ;", "n = a . size ( ) ;"],  # member on a scalar
    ["int a ;", 'a = " 1 ;'],                      # unterminated string
    ["int a ;", "if ( a < 1 {", "a = 2 ;", "}"],   # missing ')'
]

for lines in BROKEN_PROGRAMS:
    verdict = mini_check(program_from_lines(lines))
    fb = verdict.feedback
    print("program:")
    for no, text in enumerate(lines, start=1):
        marker = ">>" if no == fb.i_err else "  "
        print(f"  {marker} {no}: {text}")
    print(f"  line {fb.i_err}: {fb.raw_message}")
    print(f"  category: {categorize(fb).value}")
    print(f"  quoted arguments: {extract_arguments(fb.raw_message)}")
    print()

print("note: the reported line is where the compiler NOTICED the problem,")
print("not necessarily the line to repair (see demo 03).")
