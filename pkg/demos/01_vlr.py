"""Vertex-based layout representation on a small poster layout.

A headline sits on a banner-like underlay; a logo floats on its own. The
encoder groups the headline under the underlay, sorts vertices top-to-bottom,
left-to-right, and the tokenizer turns the result into a flat token list.

    python3 demos/01_vlr.py
"""

from scanprint import Canvas, Layout, LayoutTokenizer, PKU_CATEGORIES, decode_vlr, encode_vlr

canvas = Canvas(224, 224)
layout = Layout(
    [PKU_CATEGORIES.id_of("underlay"), PKU_CATEGORIES.id_of("text"), PKU_CATEGORIES.id_of("logo")],
    [(20, 120, 204, 180), (40, 135, 184, 165), (170, 10, 210, 40)],
)

v = encode_vlr(layout)
print("vertex tensor (category, x, y):")
for c, x, y in v.entries():
    kind = "start" if c % 2 == 0 else "end"
    print(f"  {c:2d} {PKU_CATEGORIES.name_of(c // 2):9s} {kind:5s} ({x:g}, {y:g})")

# The logo is highest on the canvas so it comes first; the underlay brackets the text.
tok = LayoutTokenizer(PKU_CATEGORIES.n_vertex_categories, canvas)
tokens = tok.encode(v)
print(f"\n{len(tokens)} tokens, vocabulary {tok.vocab_size}:")
print(" ", tokens)

back = decode_vlr(v)
print("\nround trip exact:", back.as_multiset() == layout.as_multiset())

# Tokens are quantized: decoding them is exact only up to one bin.
approx = decode_vlr(tok.decode(tokens))
print(f"max token round-trip error: {abs(approx.corners - back.corners).max():.3f} px "
      f"(bin width {tok.bin_width()[0]:.3f})")
