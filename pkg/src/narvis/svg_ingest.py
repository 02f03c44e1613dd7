"""Parse SVG markup into a scene graph and extract visual primitives.

The scene graph keeps only the two element families that matter for
decomposition: group containers (``<g>``) and shape elements.  Every shape
becomes a :class:`VisualPrimitive` whose channel values (position, size,
fill, stroke, ...) are normalized and expressed in root user units, with
all ancestor transforms accumulated.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import NarvisError

SHAPE_TAGS = ("rect", "circle", "ellipse", "line", "polyline", "polygon", "path", "text")

# elements we deliberately skip, with a document warning
IGNORED_WITH_WARNING = ("use", "image", "foreignObject")

# non-rendering containers: contents never become scene nodes
SKIPPED_TAGS = ("defs", "script", "metadata", "title", "desc", "style", "symbol", "marker",
                "clipPath", "mask", "filter", "linearGradient", "radialGradient", "pattern")

STYLE_PROPS = ("fill", "stroke", "stroke-width", "opacity", "fill-opacity",
               "stroke-opacity", "font-size")
INHERITED_PROPS = ("fill", "stroke", "stroke-width", "font-size")

Affine = tuple[float, float, float, float, float, float]
IDENTITY: Affine = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


class MalformedXml(NarvisError):
    code = "malformed_xml"


class NotSvg(NarvisError):
    code = "not_svg"


class EmptyScene(NarvisError):
    code = "empty_scene"


class UnknownPrimitive(NarvisError):
    code = "unknown_primitive"


# ---------------------------------------------------------------------------
# scene graph types

@dataclass(frozen=True)
class SceneNode:
    kind: str                     # "group" | "shape"
    element_type: str             # tag name; root is "svg", groups are "g"
    attributes: dict[str, str]
    children: tuple["SceneNode", ...]
    node_path: tuple[int, ...]    # child indices from root
    text: str = ""                # text content, only meaningful for <text>


@dataclass(frozen=True)
class SvgDocument:
    raw_markup: str
    root: SceneNode
    view_box: tuple[float, float, float, float]
    css_rules: dict[str, dict[str, str]] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    def iter_shapes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.kind == "shape":
                yield node
            else:
                stack.extend(reversed(node.children))

    @property
    def diagonal(self) -> float:
        _, _, w, h = self.view_box
        return math.hypot(w, h)


@dataclass(frozen=True)
class ChannelValues:
    position: tuple[float, float]
    size: float
    fill: str
    stroke: str
    stroke_width: float
    opacity: float
    shape_class: str


@dataclass(frozen=True)
class VisualPrimitive:
    id: str
    element_type: str
    group_chain: tuple[str, ...]
    css_classes: tuple[str, ...]
    channels: ChannelValues
    source_markup: str
    geometry_warning: bool = False


# ---------------------------------------------------------------------------
# affine transforms

def affine_multiply(m1: Affine, m2: Affine) -> Affine:
    """Compose so that m2 is applied to points first (SVG left-to-right order)."""
    a1, b1, c1, d1, e1, f1 = m1
    a2, b2, c2, d2, e2, f2 = m2
    return (
        a1 * a2 + c1 * b2,
        b1 * a2 + d1 * b2,
        a1 * c2 + c1 * d2,
        b1 * c2 + d1 * d2,
        a1 * e2 + c1 * f2 + e1,
        b1 * e2 + d1 * f2 + f1,
    )


def affine_apply(m: Affine, x: float, y: float) -> tuple[float, float]:
    a, b, c, d, e, f = m
    return (a * x + c * y + e, b * x + d * y + f)


_TRANSFORM_RE = re.compile(r"(\w+)\s*\(([^)]*)\)")
_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def parse_transform(text: str | None) -> Affine:
    """Parse an SVG transform list into a single affine matrix."""
    matrix = IDENTITY
    if not text:
        return matrix
    for name, args in _TRANSFORM_RE.findall(text):
        nums = [float(v) for v in _NUMBER_RE.findall(args)]
        if name == "translate":
            tx = nums[0] if nums else 0.0
            ty = nums[1] if len(nums) > 1 else 0.0
            step: Affine = (1, 0, 0, 1, tx, ty)
        elif name == "scale":
            sx = nums[0] if nums else 1.0
            sy = nums[1] if len(nums) > 1 else sx
            step = (sx, 0, 0, sy, 0, 0)
        elif name == "rotate":
            ang = math.radians(nums[0]) if nums else 0.0
            ca, sa = math.cos(ang), math.sin(ang)
            step = (ca, sa, -sa, ca, 0, 0)
            if len(nums) >= 3:
                cx, cy = nums[1], nums[2]
                step = affine_multiply(affine_multiply((1, 0, 0, 1, cx, cy), step),
                                       (1, 0, 0, 1, -cx, -cy))
        elif name == "skewX":
            step = (1, 0, math.tan(math.radians(nums[0])), 1, 0, 0)
        elif name == "skewY":
            step = (1, math.tan(math.radians(nums[0])), 0, 1, 0, 0)
        elif name == "matrix" and len(nums) == 6:
            step = tuple(nums)  # type: ignore[assignment]
        else:
            continue
        matrix = affine_multiply(matrix, step)
    return matrix


def format_transform(m: Affine) -> str:
    parts = []
    for v in m:
        r = round(v, 6)
        parts.append(("%d" % r) if r == int(r) else repr(r))
    return "matrix(%s)" % ",".join(parts)


# ---------------------------------------------------------------------------
# color normalization

# CSS3 extended color keywords
NAMED_COLORS = {
    'aliceblue': '#F0F8FF', 'antiquewhite': '#FAEBD7', 'aqua': '#00FFFF', 'aquamarine': '#7FFFD4',
    'azure': '#F0FFFF', 'beige': '#F5F5DC', 'bisque': '#FFE4C4', 'black': '#000000',
    'blanchedalmond': '#FFEBCD', 'blue': '#0000FF', 'blueviolet': '#8A2BE2', 'brown': '#A52A2A',
    'burlywood': '#DEB887', 'cadetblue': '#5F9EA0', 'chartreuse': '#7FFF00', 'chocolate': '#D2691E',
    'coral': '#FF7F50', 'cornflowerblue': '#6495ED', 'cornsilk': '#FFF8DC', 'crimson': '#DC143C',
    'cyan': '#00FFFF', 'darkblue': '#00008B', 'darkcyan': '#008B8B', 'darkgoldenrod': '#B8860B',
    'darkgray': '#A9A9A9', 'darkgreen': '#006400', 'darkgrey': '#A9A9A9', 'darkkhaki': '#BDB76B',
    'darkmagenta': '#8B008B', 'darkolivegreen': '#556B2F', 'darkorange': '#FF8C00', 'darkorchid': '#9932CC',
    'darkred': '#8B0000', 'darksalmon': '#E9967A', 'darkseagreen': '#8FBC8F', 'darkslateblue': '#483D8B',
    'darkslategray': '#2F4F4F', 'darkslategrey': '#2F4F4F', 'darkturquoise': '#00CED1', 'darkviolet': '#9400D3',
    'deeppink': '#FF1493', 'deepskyblue': '#00BFFF', 'dimgray': '#696969', 'dimgrey': '#696969',
    'dodgerblue': '#1E90FF', 'firebrick': '#B22222', 'floralwhite': '#FFFAF0', 'forestgreen': '#228B22',
    'fuchsia': '#FF00FF', 'gainsboro': '#DCDCDC', 'ghostwhite': '#F8F8FF', 'gold': '#FFD700',
    'goldenrod': '#DAA520', 'gray': '#808080', 'green': '#008000', 'greenyellow': '#ADFF2F',
    'grey': '#808080', 'honeydew': '#F0FFF0', 'hotpink': '#FF69B4', 'indianred': '#CD5C5C',
    'indigo': '#4B0082', 'ivory': '#FFFFF0', 'khaki': '#F0E68C', 'lavender': '#E6E6FA',
    'lavenderblush': '#FFF0F5', 'lawngreen': '#7CFC00', 'lemonchiffon': '#FFFACD', 'lightblue': '#ADD8E6',
    'lightcoral': '#F08080', 'lightcyan': '#E0FFFF', 'lightgoldenrodyellow': '#FAFAD2', 'lightgray': '#D3D3D3',
    'lightgreen': '#90EE90', 'lightgrey': '#D3D3D3', 'lightpink': '#FFB6C1', 'lightsalmon': '#FFA07A',
    'lightseagreen': '#20B2AA', 'lightskyblue': '#87CEFA', 'lightslategray': '#778899', 'lightslategrey': '#778899',
    'lightsteelblue': '#B0C4DE', 'lightyellow': '#FFFFE0', 'lime': '#00FF00', 'limegreen': '#32CD32',
    'linen': '#FAF0E6', 'magenta': '#FF00FF', 'maroon': '#800000', 'mediumaquamarine': '#66CDAA',
    'mediumblue': '#0000CD', 'mediumorchid': '#BA55D3', 'mediumpurple': '#9370DB', 'mediumseagreen': '#3CB371',
    'mediumslateblue': '#7B68EE', 'mediumspringgreen': '#00FA9A', 'mediumturquoise': '#48D1CC', 'mediumvioletred': '#C71585',
    'midnightblue': '#191970', 'mintcream': '#F5FFFA', 'mistyrose': '#FFE4E1', 'moccasin': '#FFE4B5',
    'navajowhite': '#FFDEAD', 'navy': '#000080', 'oldlace': '#FDF5E6', 'olive': '#808000',
    'olivedrab': '#6B8E23', 'orange': '#FFA500', 'orangered': '#FF4500', 'orchid': '#DA70D6',
    'palegoldenrod': '#EEE8AA', 'palegreen': '#98FB98', 'paleturquoise': '#AFEEEE', 'palevioletred': '#DB7093',
    'papayawhip': '#FFEFD5', 'peachpuff': '#FFDAB9', 'peru': '#CD853F', 'pink': '#FFC0CB',
    'plum': '#DDA0DD', 'powderblue': '#B0E0E6', 'purple': '#800080', 'rebeccapurple': '#663399',
    'red': '#FF0000', 'rosybrown': '#BC8F8F', 'royalblue': '#4169E1', 'saddlebrown': '#8B4513',
    'salmon': '#FA8072', 'sandybrown': '#F4A460', 'seagreen': '#2E8B57', 'seashell': '#FFF5EE',
    'sienna': '#A0522D', 'silver': '#C0C0C0', 'skyblue': '#87CEEB', 'slateblue': '#6A5ACD',
    'slategray': '#708090', 'slategrey': '#708090', 'snow': '#FFFAFA', 'springgreen': '#00FF7F',
    'steelblue': '#4682B4', 'tan': '#D2B48C', 'teal': '#008080', 'thistle': '#D8BFD8',
    'tomato': '#FF6347', 'turquoise': '#40E0D0', 'violet': '#EE82EE', 'wheat': '#F5DEB3',
    'white': '#FFFFFF', 'whitesmoke': '#F5F5F5', 'yellow': '#FFFF00', 'yellowgreen': '#9ACD32',
}

_RGB_RE = re.compile(r"rgba?\(([^)]*)\)")


def normalize_color(value: str | None, alpha: float = 1.0) -> str:
    """Normalize a CSS color to uppercase #RRGGBBAA; "none" passes through.

    Unresolvable values (gradients via url(), currentColor) are returned
    unchanged so clustering still sees a stable token.
    """
    if value is None:
        return "none"
    value = value.strip()
    if value == "" or value.lower() == "none":
        return "none"
    low = value.lower()
    if low in NAMED_COLORS:
        value = NAMED_COLORS[low]
    m = _RGB_RE.match(low)
    if m:
        parts = [p.strip() for p in m.group(1).split(",")]
        try:
            rgb = []
            for p in parts[:3]:
                if p.endswith("%"):
                    rgb.append(round(float(p[:-1]) * 255 / 100))
                else:
                    rgb.append(round(float(p)))
            a = float(parts[3]) if len(parts) > 3 else 1.0
        except ValueError:
            return value
        r, g, b = (max(0, min(255, v)) for v in rgb)
        return "#%02X%02X%02X%02X" % (r, g, b, _alpha_byte(a * alpha))
    if value.startswith("#"):
        hexpart = value[1:]
        if len(hexpart) == 3:
            hexpart = "".join(ch * 2 for ch in hexpart) + "FF"
        elif len(hexpart) == 4:
            hexpart = "".join(ch * 2 for ch in hexpart)
        elif len(hexpart) == 6:
            hexpart = hexpart + "FF"
        elif len(hexpart) != 8:
            return value
        try:
            r, g, b, a = (int(hexpart[i:i + 2], 16) for i in (0, 2, 4, 6))
        except ValueError:
            return value
        return "#%02X%02X%02X%02X" % (r, g, b, _alpha_byte((a / 255) * alpha))
    return value


def _alpha_byte(a: float) -> int:
    return max(0, min(255, round(a * 255)))


# ---------------------------------------------------------------------------
# path geometry

_CMD_ARGC = {"M": 2, "L": 2, "H": 1, "V": 1, "C": 6, "S": 4, "Q": 4, "T": 2, "A": 7, "Z": 0}
CURVE_SAMPLES = 16
ARC_SAMPLES = 24


class _PathScanner:
    """Token scanner for path data; arc flags are single 0/1 characters."""

    def __init__(self, d: str):
        self.d = d
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.d) and (self.d[self.pos].isspace() or self.d[self.pos] == ","):
            self.pos += 1

    def command(self) -> str | None:
        self._skip()
        if self.pos >= len(self.d):
            return None
        ch = self.d[self.pos]
        if ch.isalpha():
            self.pos += 1
            return ch
        return None

    def number(self) -> float:
        self._skip()
        m = _NUMBER_RE.match(self.d, self.pos)
        if not m:
            raise ValueError(f"expected number at {self.pos} in path data")
        self.pos = m.end()
        return float(m.group(0))

    def flag(self) -> int:
        self._skip()
        if self.pos < len(self.d) and self.d[self.pos] in "01":
            ch = self.d[self.pos]
            self.pos += 1
            return int(ch)
        raise ValueError(f"expected arc flag at {self.pos} in path data")

    def at_end(self) -> bool:
        self._skip()
        return self.pos >= len(self.d)


def path_signature(d: str) -> str:
    """Uppercased command letters in order, coordinates ignored."""
    return "".join(re.findall(r"[A-Za-z]", d)).upper()


def sample_path(d: str) -> list[tuple[float, float]]:
    """Flatten path data to a point sequence (curves and arcs sampled).

    Raises ValueError on unparseable data.
    """
    sc = _PathScanner(d)
    pts: list[tuple[float, float]] = []
    cur = (0.0, 0.0)
    start = (0.0, 0.0)
    prev_cubic_ctrl: tuple[float, float] | None = None
    prev_quad_ctrl: tuple[float, float] | None = None
    cmd = None
    while not sc.at_end():
        nxt = sc.command()
        if nxt is not None:
            cmd = nxt
        elif cmd is None:
            raise ValueError("path data does not start with a command")
        elif cmd in "Mm":
            # implicit lineto after moveto
            cmd = "L" if cmd == "M" else "l"
        rel = cmd.islower()
        op = cmd.upper()
        if op not in _CMD_ARGC:
            raise ValueError(f"unknown path command {cmd!r}")

        def pt(x: float, y: float) -> tuple[float, float]:
            return (cur[0] + x, cur[1] + y) if rel else (x, y)

        if op == "Z":
            cur = start
            pts.append(cur)
            prev_cubic_ctrl = prev_quad_ctrl = None
            continue
        if op == "M":
            cur = pt(sc.number(), sc.number())
            start = cur
            pts.append(cur)
            prev_cubic_ctrl = prev_quad_ctrl = None
            continue
        if op == "L":
            cur = pt(sc.number(), sc.number())
        elif op == "H":
            x = sc.number()
            cur = (cur[0] + x if rel else x, cur[1])
        elif op == "V":
            y = sc.number()
            cur = (cur[0], cur[1] + y if rel else y)
        elif op in ("C", "S"):
            if op == "C":
                c1 = pt(sc.number(), sc.number())
            else:
                c1 = _reflect(cur, prev_cubic_ctrl)
            c2 = pt(sc.number(), sc.number())
            end = pt(sc.number(), sc.number())
            pts.extend(_cubic_points(cur, c1, c2, end))
            prev_cubic_ctrl, prev_quad_ctrl = c2, None
            cur = end
            continue
        elif op in ("Q", "T"):
            if op == "Q":
                c1 = pt(sc.number(), sc.number())
            else:
                c1 = _reflect(cur, prev_quad_ctrl)
            end = pt(sc.number(), sc.number())
            pts.extend(_quad_points(cur, c1, end))
            prev_quad_ctrl, prev_cubic_ctrl = c1, None
            cur = end
            continue
        elif op == "A":
            rx, ry, rot = sc.number(), sc.number(), sc.number()
            large, sweep = sc.flag(), sc.flag()
            end = pt(sc.number(), sc.number())
            pts.extend(_arc_points(cur, rx, ry, rot, large, sweep, end))
            cur = end
            prev_cubic_ctrl = prev_quad_ctrl = None
            continue
        pts.append(cur)
        prev_cubic_ctrl = prev_quad_ctrl = None
    if not pts:
        raise ValueError("path data produced no points")
    return pts


def _reflect(cur, ctrl):
    if ctrl is None:
        return cur
    return (2 * cur[0] - ctrl[0], 2 * cur[1] - ctrl[1])


def _cubic_points(p0, p1, p2, p3, n=CURVE_SAMPLES):
    out = []
    for i in range(1, n + 1):
        t = i / n
        mt = 1 - t
        x = mt**3 * p0[0] + 3 * mt**2 * t * p1[0] + 3 * mt * t**2 * p2[0] + t**3 * p3[0]
        y = mt**3 * p0[1] + 3 * mt**2 * t * p1[1] + 3 * mt * t**2 * p2[1] + t**3 * p3[1]
        out.append((x, y))
    return out


def _quad_points(p0, p1, p2, n=CURVE_SAMPLES):
    out = []
    for i in range(1, n + 1):
        t = i / n
        mt = 1 - t
        x = mt**2 * p0[0] + 2 * mt * t * p1[0] + t**2 * p2[0]
        y = mt**2 * p0[1] + 2 * mt * t * p1[1] + t**2 * p2[1]
        out.append((x, y))
    return out


def _arc_points(p0, rx, ry, rot_deg, large, sweep, p1, n=ARC_SAMPLES):
    # SVG endpoint-to-center conversion; degenerate radii collapse to a line
    if rx == 0 or ry == 0 or p0 == p1:
        return [p1]
    rx, ry = abs(rx), abs(ry)
    phi = math.radians(rot_deg)
    cp, sp = math.cos(phi), math.sin(phi)
    dx, dy = (p0[0] - p1[0]) / 2, (p0[1] - p1[1]) / 2
    x1p = cp * dx + sp * dy
    y1p = -sp * dx + cp * dy
    lam = x1p**2 / rx**2 + y1p**2 / ry**2
    if lam > 1:
        s = math.sqrt(lam)
        rx, ry = rx * s, ry * s
    num = rx**2 * ry**2 - rx**2 * y1p**2 - ry**2 * x1p**2
    den = rx**2 * y1p**2 + ry**2 * x1p**2
    coef = math.sqrt(max(0.0, num / den)) if den else 0.0
    if large == sweep:
        coef = -coef
    cxp = coef * rx * y1p / ry
    cyp = -coef * ry * x1p / rx
    cx = cp * cxp - sp * cyp + (p0[0] + p1[0]) / 2
    cy = sp * cxp + cp * cyp + (p0[1] + p1[1]) / 2

    def angle(ux, uy, vx, vy):
        dot = ux * vx + uy * vy
        mag = math.hypot(ux, uy) * math.hypot(vx, vy)
        a = math.acos(max(-1.0, min(1.0, dot / mag)))
        if ux * vy - uy * vx < 0:
            a = -a
        return a

    th1 = angle(1, 0, (x1p - cxp) / rx, (y1p - cyp) / ry)
    dth = angle((x1p - cxp) / rx, (y1p - cyp) / ry, (-x1p - cxp) / rx, (-y1p - cyp) / ry)
    if not sweep and dth > 0:
        dth -= 2 * math.pi
    elif sweep and dth < 0:
        dth += 2 * math.pi
    out = []
    for i in range(1, n + 1):
        th = th1 + dth * i / n
        x = cx + rx * math.cos(th) * cp - ry * math.sin(th) * sp
        y = cy + rx * math.cos(th) * sp + ry * math.sin(th) * cp
        out.append((x, y))
    return out


# ---------------------------------------------------------------------------
# parsing

def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


_CSS_RULE_RE = re.compile(r"([^{}]+)\{([^}]*)\}")


def _parse_css(text: str, warnings: list[str]) -> dict[str, dict[str, str]]:
    """Extract `.class { prop: val }` rules; anything else is warned about."""
    rules: dict[str, dict[str, str]] = {}
    for selector, body in _CSS_RULE_RE.findall(text):
        selector = selector.strip()
        props = _parse_style_decl(body)
        props = {k: v for k, v in props.items() if k in STYLE_PROPS}
        if re.fullmatch(r"\.[\w-]+", selector):
            rules.setdefault(selector[1:], {}).update(props)
        elif selector:
            warnings.append(f"css selector {selector!r} ignored (only .class supported)")
    return rules


def _parse_style_decl(text: str) -> dict[str, str]:
    out = {}
    for item in text.split(";"):
        if ":" in item:
            k, v = item.split(":", 1)
            out[k.strip()] = v.strip()
    return out


def parse_svg(markup: str) -> SvgDocument:
    """Parse SVG markup into a document with a group/shape scene graph."""
    try:
        xml_root = ET.fromstring(markup)
    except ET.ParseError as exc:
        raise MalformedXml(f"cannot parse SVG: {exc}") from exc
    if _localname(xml_root.tag) != "svg":
        raise NotSvg(f"root element is <{_localname(xml_root.tag)}>, expected <svg>")

    warnings: list[str] = []
    css_rules: dict[str, dict[str, str]] = {}
    for el in xml_root.iter():
        if _localname(el.tag) == "style" and el.text:
            css_rules.update(_parse_css(el.text, warnings))

    def build(el: ET.Element, path: tuple[int, ...]) -> SceneNode | None:
        tag = _localname(el.tag)
        attrs = {_localname(k): v for k, v in el.attrib.items()}
        if tag in SHAPE_TAGS and path:
            text = "".join(el.itertext()) if tag == "text" else ""
            return SceneNode("shape", tag, attrs, (), path, text)
        if tag in ("g", "svg"):
            children = []
            for child in el:
                ctag = _localname(child.tag)
                if ctag in IGNORED_WITH_WARNING:
                    warnings.append(f"<{ctag}> element ignored")
                    continue
                if ctag in SKIPPED_TAGS:
                    continue
                node = build(child, path + (len(children),))
                if node is not None:
                    children.append(node)
            return SceneNode("group", "svg" if not path else "g", attrs, tuple(children), path)
        if tag not in SKIPPED_TAGS:
            warnings.append(f"<{tag}> element ignored")
        return None

    root = build(xml_root, ())
    assert root is not None
    if not any(True for _ in _iter_shape_nodes(root)):
        raise EmptyScene("document contains no shape elements")

    view_box = _resolve_view_box(root.attributes)
    return SvgDocument(markup, root, view_box, css_rules, tuple(warnings))


def _iter_shape_nodes(root: SceneNode):
    stack = [root]
    while stack:
        node = stack.pop()
        if node.kind == "shape":
            yield node
        else:
            stack.extend(reversed(node.children))


def _resolve_view_box(attrs: dict[str, str]) -> tuple[float, float, float, float]:
    vb = attrs.get("viewBox")
    if vb:
        nums = [float(v) for v in _NUMBER_RE.findall(vb)]
        if len(nums) == 4:
            return tuple(nums)  # type: ignore[return-value]
    try:
        w = float(_NUMBER_RE.findall(attrs.get("width", ""))[0])
        h = float(_NUMBER_RE.findall(attrs.get("height", ""))[0])
        return (0.0, 0.0, w, h)
    except (IndexError, ValueError):
        return (0.0, 0.0, 300.0, 150.0)


# ---------------------------------------------------------------------------
# primitive extraction

def extract_primitives(doc: SvgDocument) -> list[VisualPrimitive]:
    """One primitive per shape node, document order, transforms accumulated."""
    out: list[VisualPrimitive] = []

    def walk(node: SceneNode, matrix: Affine, chain: tuple[str, ...],
             inherited: dict[str, str]):
        style = dict(inherited)
        own = _resolved_style(node, doc.css_rules)
        for k in INHERITED_PROPS:
            if k in own:
                style[k] = own[k]
        matrix = affine_multiply(matrix, parse_transform(node.attributes.get("transform")))
        if node.kind == "group":
            if node.element_type == "g":
                chain = chain + (_group_label(node),)
            for child in node.children:
                walk(child, matrix, chain, style)
            return
        out.append(_make_primitive(node, matrix, chain, {**style, **own}))

    walk(doc.root, IDENTITY, (), {})
    return out


def _group_label(node: SceneNode) -> str:
    attrs = node.attributes
    if attrs.get("id"):
        return attrs["id"]
    if attrs.get("class"):
        return attrs["class"]
    return "g" + ".".join(str(i) for i in node.node_path)


def _resolved_style(node: SceneNode, css_rules: dict[str, dict[str, str]]) -> dict[str, str]:
    """Presentation attributes < .class rules < inline style attribute."""
    style: dict[str, str] = {}
    for prop in STYLE_PROPS:
        if prop in node.attributes:
            style[prop] = node.attributes[prop]
    for cls in node.attributes.get("class", "").split():
        if cls in css_rules:
            style.update(css_rules[cls])
    style.update({k: v for k, v in _parse_style_decl(node.attributes.get("style", "")).items()
                  if k in STYLE_PROPS})
    return style


def _make_primitive(node: SceneNode, matrix: Affine, chain: tuple[str, ...],
                    style: dict[str, str]) -> VisualPrimitive:
    fill_alpha = _safe_float(style.get("fill-opacity"), 1.0)
    stroke_alpha = _safe_float(style.get("stroke-opacity"), 1.0)
    fill = normalize_color(style.get("fill", "#000000"), fill_alpha)
    stroke = normalize_color(style.get("stroke", "none"), stroke_alpha)
    stroke_width = _safe_float(style.get("stroke-width"), 1.0)
    opacity = max(0.0, min(1.0, _safe_float(style.get("opacity"), 1.0)))

    bbox, warn = _shape_bbox(node, matrix, style)
    if bbox is None:
        position, size = (0.0, 0.0), 0.0
    else:
        x0, y0, x1, y1 = bbox
        position = ((x0 + x1) / 2, (y0 + y1) / 2)
        size = (x1 - x0) * (y1 - y0)

    if node.element_type == "path":
        shape_class = path_signature(node.attributes.get("d", ""))
    else:
        shape_class = node.element_type

    return VisualPrimitive(
        id="p" + "-".join(str(i) for i in node.node_path),
        element_type=node.element_type,
        group_chain=chain,
        css_classes=tuple(node.attributes.get("class", "").split()),
        channels=ChannelValues(position, size, fill, stroke, stroke_width, opacity, shape_class),
        source_markup=_standalone_markup(node, matrix),
        geometry_warning=warn,
    )


def _safe_float(value: str | None, default: float) -> float:
    if value is None:
        return default
    try:
        return float(_NUMBER_RE.findall(value)[0])
    except (IndexError, ValueError):
        return default


def _attr_float(node: SceneNode, name: str, default: float = 0.0) -> float:
    return _safe_float(node.attributes.get(name), default)


def _points_attr(node: SceneNode) -> list[tuple[float, float]]:
    nums = [float(v) for v in _NUMBER_RE.findall(node.attributes.get("points", ""))]
    return list(zip(nums[0::2], nums[1::2]))


def _shape_bbox(node: SceneNode, m: Affine, style: dict[str, str]):
    """Transformed bounding box (x0, y0, x1, y1) and a geometry-warning flag."""
    et = node.element_type
    if et in ("circle", "ellipse"):
        cx, cy = _attr_float(node, "cx"), _attr_float(node, "cy")
        if et == "circle":
            rx = ry = _attr_float(node, "r")
        else:
            rx, ry = _attr_float(node, "rx"), _attr_float(node, "ry")
        a, b, c, d, _, _ = m
        tcx, tcy = affine_apply(m, cx, cy)
        wx = math.hypot(a * rx, c * ry)
        wy = math.hypot(b * rx, d * ry)
        return (tcx - wx, tcy - wy, tcx + wx, tcy + wy), False
    if et == "rect":
        x, y = _attr_float(node, "x"), _attr_float(node, "y")
        w, h = _attr_float(node, "width"), _attr_float(node, "height")
        pts = [(x, y), (x + w, y), (x, y + h), (x + w, y + h)]
    elif et == "line":
        pts = [(_attr_float(node, "x1"), _attr_float(node, "y1")),
               (_attr_float(node, "x2"), _attr_float(node, "y2"))]
    elif et in ("polyline", "polygon"):
        pts = _points_attr(node)
        if not pts:
            return None, True
    elif et == "path":
        try:
            pts = sample_path(node.attributes.get("d", ""))
        except ValueError:
            return None, True
    elif et == "text":
        x, y = _attr_float(node, "x"), _attr_float(node, "y")
        fs = _safe_float(style.get("font-size"), 16.0)
        width = 0.6 * fs * len(node.text)
        pts = [(x, y - 0.8 * fs), (x + width, y + 0.2 * fs)]
    else:
        return None, True
    tpts = [affine_apply(m, px, py) for px, py in pts]
    xs = [p[0] for p in tpts]
    ys = [p[1] for p in tpts]
    return (min(xs), min(ys), max(xs), max(ys)), False


def _standalone_markup(node: SceneNode, matrix: Affine) -> str:
    el = ET.Element(node.element_type)
    for k, v in node.attributes.items():
        if k != "transform":
            el.set(k, v)
    if matrix != IDENTITY:
        el.set("transform", format_transform(matrix))
    if node.text:
        el.text = node.text
    return ET.tostring(el, encoding="unicode")


# ---------------------------------------------------------------------------
# serialization

def serialize_document(doc: SvgDocument, tag_primitives: bool = False) -> str:
    """Regenerate markup from the scene graph (round-trips to an isomorphic graph).

    With tag_primitives, shapes carry a data-prim attribute matching the
    ids of extract_primitives (used by the UI for hover highlighting).
    """

    def emit(node: SceneNode) -> ET.Element:
        el = ET.Element(node.element_type)
        for k, v in node.attributes.items():
            el.set(k, v)
        if tag_primitives and node.kind == "shape":
            el.set("data-prim", "p" + "-".join(str(i) for i in node.node_path))
        if node.text:
            el.text = node.text
        for child in node.children:
            el.append(emit(child))
        return el

    return ET.tostring(emit(doc.root), encoding="unicode")


def primitives_to_json(primitives: list[VisualPrimitive]) -> list[dict]:
    out = []
    for p in primitives:
        ch = p.channels
        out.append({
            "id": p.id,
            "element_type": p.element_type,
            "group_chain": list(p.group_chain),
            "css_classes": list(p.css_classes),
            "channels": {
                "position": list(ch.position),
                "size": ch.size,
                "fill": ch.fill,
                "stroke": ch.stroke,
                "stroke_width": ch.stroke_width,
                "opacity": ch.opacity,
                "shape_class": ch.shape_class,
            },
            "source_markup": p.source_markup,
            "geometry_warning": p.geometry_warning,
        })
    return out
