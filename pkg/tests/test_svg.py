import re
import xml.etree.ElementTree as ET

import pytest

from builders import M, instance, layout
from storyline_extension import EubpInstance, InvalidLayoutError, reduce, solve
from storyline_extension.svg import render_svg

SVG = "{http://www.w3.org/2000/svg}"


def parse(doc):
    return ET.fromstring(doc.encode())


def polylines(root):
    out = {}
    for el in root.iter(SVG + "polyline"):
        pts = [tuple(float(v) for v in p.split(",")) for p in el.get("points").split()]
        out[el.get("data-character")] = pts
    return out


def test_empty_instance_renders_shell():
    root = parse(render_svg(instance(), layout()))
    assert root.tag == SVG + "svg"
    assert root.get("version") == "1.1"
    assert not list(root.iter(SVG + "polyline"))


def test_single_swap_exchanges_ranks(two_swaps):
    inst, lay = two_swaps
    lines = polylines(parse(render_svg(inst, lay, row_height=24, step=48)))
    (ax0, ay0), (ax1, ay1) = lines["a"][:2]
    (_, by0), (_, by1) = lines["b"][:2]
    assert ay0 < by0 and ay1 > by1
    assert ax1 - ax0 == 48
    assert abs(ay0 - by0) == 24


def test_meetings_are_translucent_rectangles():
    inst = instance(M("ab", 1, 2))
    root = parse(render_svg(inst, layout("ab", "ab"), opacity=0.25))
    rects = list(root.iter(SVG + "rect"))
    assert len(rects) == 1
    assert rects[0].get("fill-opacity") == "0.25"


def test_invalid_layout_is_refused():
    inst = instance(M("ab", 1, 2))
    with pytest.raises(InvalidLayoutError):
        render_svg(inst, layout("ab", "ba"))


def test_reduction_witness_has_distinct_ranks():
    p = reduce(EubpInstance((1, 1), 2, 1))
    r = solve(p)
    doc = render_svg(p.full, r.witness, highlight=p.new_characters)
    lines = polylines(parse(doc))
    assert set(lines) == set(p.full.characters)
    for t in range(1, p.full.tau + 1):
        x = 16 + 90 + (t - 1) * 48
        ys = [y for pts in lines.values() for (px, y) in pts if px == x]
        assert len(ys) == len(set(ys)) == len(p.full.active(t))
    assert len(re.findall("stroke-dasharray", doc)) == len(p.new_characters)


def test_rendering_is_deterministic(two_swaps):
    inst, lay = two_swaps
    assert render_svg(inst, lay) == render_svg(inst, lay)
