"""The program-feedback graph: same-symbol cliques across code and message.

The error below is reported on line 9, but the fix belongs on line 5 (the
declaration). The clique for `a` ties the message token to every use and
the declaration, which is exactly the hop the model's attention follows.
"""

from linefix.corpus import declaration_analog_example
from linefix.evaluator import mini_check
from linefix.graph import build_graph, neighbors, parse_graph, serialize_graph

broken, fixed, gold_line = declaration_analog_example()
verdict = mini_check(broken)
fb = verdict.feedback

print(broken.to_text())
print(f"\ndiagnostic (line {fb.i_err}): {fb.raw_message}")
print(f"line to repair: {gold_line} -> {' '.join(t.text for t in fixed.lines[gold_line - 1])}\n")

g = build_graph(broken, fb)
print(f"graph: {len(g.nodes)} nodes, {g.edge_count()} edges")
for members in g.cliques():
    if len(members) < 2:
        continue
    symbol = g.nodes[members[0]].symbol
    places = ", ".join(
        f"msg[{g.nodes[m].index}]" if g.nodes[m].origin == "msg"
        else f"L{g.nodes[m].line}" for m in members)
    print(f"  clique {symbol!r}: {places}")

a_msg = next(i for i, n in enumerate(g.nodes)
             if n.origin == "msg" and n.symbol == "a")
print(f"\nneighbors of the message token 'a': "
      f"{[(g.nodes[j].origin, g.nodes[j].line) for j in neighbors(g, a_msg)]}")

blob = serialize_graph(g)
assert parse_graph(blob) == g
print(f"\nserialized dump: {len(blob)} bytes, round-trips losslessly")
