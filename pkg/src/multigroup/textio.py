"""Line-oriented text format for instances and labeled samples.

An instance file is a sequence of bracketed sections::

    # comments start with '#'
    [domain]
    a b c
    [groups]
    g1: a b
    g2: b c
    [hypotheses]
    h1: +1 -1 +1
    blk: fixed: a=+1,b=-1 free: c
    [mass]
    a 0.5
    b 0.25
    c 0.25
    [target]
    a +1
    b -1
    c +1
    [sample]
    a +1

``[domain]`` lists point ids (whitespace separated, any number of lines).
A hypothesis line is either an explicit row of labels in domain order or a
block with a fixed part and a list of free points. ``[mass]`` values are
floats or fractions such as ``1/3``. ``[target]`` and ``[label_prob]`` are
mutually exclusive; ``[mass]``, ``[target]``, ``[label_prob]`` and
``[sample]`` are optional. Serialization writes floats with ``repr`` so a
parse/serialize/parse cycle reproduces the same objects bit for bit.

A sample file holds ``point label`` lines, optionally under ``[sample]``.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .errors import ValidationError
from .instance import (
    FiniteDomain,
    FiniteInstance,
    Group,
    GroupFamily,
    Hypothesis,
    HypothesisClass,
    LabeledSample,
)

SECTIONS = ("domain", "groups", "hypotheses", "mass", "target", "label_prob", "sample")


def format_label(y: int) -> str:
    return "+1" if y > 0 else "-1"


def parse_label(tok: str) -> int:
    if tok in ("+1", "1", "+"):
        return 1
    if tok in ("-1", "-"):
        return -1
    raise ValidationError(f"bad label {tok!r}")


def _parse_number(tok: str) -> float:
    try:
        return float(Fraction(tok)) if "/" in tok else float(tok)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"bad number {tok!r}") from None


def _split_sections(text: str) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in SECTIONS:
                raise ValidationError(f"line {lineno}: unknown section [{current}]")
            if current in sections:
                raise ValidationError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise ValidationError(f"line {lineno}: content before first section")
        sections[current].append((lineno, line))
    return sections


def _parse_table(lines, conv, name) -> dict:
    out = {}
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"line {lineno}: expected '<point> <value>' in [{name}]")
        if parts[0] in out:
            raise ValidationError(f"line {lineno}: duplicate entry for {parts[0]!r}")
        out[parts[0]] = conv(parts[1])
    return out


def _parse_hypothesis(lineno: int, line: str, domain: FiniteDomain) -> Hypothesis:
    hid, sep, rest = line.partition(":")
    if not sep:
        raise ValidationError(f"line {lineno}: expected '<id>: ...'")
    hid, rest = hid.strip(), rest.strip()
    if not rest.startswith("fixed:"):
        labels = [parse_label(t) for t in rest.split()]
        if len(labels) != len(domain):
            raise ValidationError(f"line {lineno}: row has {len(labels)} labels, domain has {len(domain)}")
        return Hypothesis(hid, dict(zip(domain.points, labels)))
    body = rest[len("fixed:"):]
    fixed_part, sep, free_part = body.partition("free:")
    if not sep:
        raise ValidationError(f"line {lineno}: block needs a 'free:' part")
    fixed = {}
    for item in fixed_part.replace(",", " ").split():
        x, eq, y = item.partition("=")
        if not eq:
            raise ValidationError(f"line {lineno}: bad fixed entry {item!r}")
        fixed[x] = parse_label(y)
    free = frozenset(free_part.replace(",", " ").split())
    return Hypothesis(hid, fixed, free)


def loads_sample(text: str) -> LabeledSample:
    examples = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line == "[sample]":
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"line {lineno}: expected '<point> <label>'")
        examples.append((parts[0], parse_label(parts[1])))
    return LabeledSample(tuple(examples))


def dumps_sample(sample: LabeledSample, header: bool = True) -> str:
    lines = ["[sample]"] if header else []
    lines += [f"{x} {format_label(y)}" for x, y in sample]
    return "\n".join(lines) + "\n"


def loads_instance(text: str) -> tuple[FiniteInstance, LabeledSample | None]:
    """Parse an instance file; returns the instance and its embedded sample."""
    sections = _split_sections(text)
    for required in ("domain", "groups", "hypotheses"):
        if required not in sections:
            raise ValidationError(f"missing section [{required}]")

    domain = FiniteDomain(tuple(tok for _, line in sections["domain"] for tok in line.split()))

    groups = []
    for lineno, line in sections["groups"]:
        gid, sep, members = line.partition(":")
        if not sep:
            raise ValidationError(f"line {lineno}: expected '<group id>: <points>'")
        groups.append(Group(gid.strip(), frozenset(members.split())))

    hyps = [_parse_hypothesis(lineno, line, domain) for lineno, line in sections["hypotheses"]]

    mass = _parse_table(sections["mass"], _parse_number, "mass") if "mass" in sections else None
    target = _parse_table(sections["target"], parse_label, "target") if "target" in sections else None
    label_prob = (_parse_table(sections["label_prob"], _parse_number, "label_prob")
                  if "label_prob" in sections else None)

    inst = FiniteInstance(domain, GroupFamily(tuple(groups)), HypothesisClass(tuple(hyps)),
                          mass=mass, target=target, label_prob=label_prob)
    sample = None
    if "sample" in sections:
        sample = loads_sample("\n".join(line for _, line in sections["sample"]))
        sample.check_domain(domain)
    return inst, sample


def dumps_instance(inst: FiniteInstance, sample: LabeledSample | None = None) -> str:
    dom = inst.domain
    out = ["[domain]", " ".join(dom.points), "[groups]"]
    for g in inst.groups:
        out.append(f"{g.id}: {' '.join(dom.ordered(g.members))}".rstrip())
    out.append("[hypotheses]")
    for h in inst.hypotheses:
        if not h.free and len(h.fixed) == len(dom):
            out.append(f"{h.id}: {' '.join(format_label(h.fixed[x]) for x in dom)}")
        else:
            fixed = ",".join(f"{x}={format_label(h.fixed[x])}" for x in dom.ordered(h.fixed))
            free = ",".join(dom.ordered(h.free))
            out.append(f"{h.id}: fixed: {fixed} free: {free}".rstrip())
    if inst.mass is not None:
        out.append("[mass]")
        out += [f"{x} {inst.mass[x]!r}" for x in dom.ordered(inst.mass)]
    if inst.target is not None:
        out.append("[target]")
        out += [f"{x} {format_label(inst.target[x])}" for x in dom.ordered(inst.target)]
    if inst.label_prob is not None:
        out.append("[label_prob]")
        out += [f"{x} {inst.label_prob[x]!r}" for x in dom.ordered(inst.label_prob)]
    text = "\n".join(out) + "\n"
    if sample is not None:
        text += dumps_sample(sample)
    return text


def read_instance(path) -> tuple[FiniteInstance, LabeledSample | None]:
    return loads_instance(Path(path).read_text())


def write_instance(path, inst: FiniteInstance, sample: LabeledSample | None = None) -> None:
    Path(path).write_text(dumps_instance(inst, sample))


def read_sample(path) -> LabeledSample:
    return loads_sample(Path(path).read_text())
