#!/usr/bin/env python3
"""Generate the bundled Python fixture corpus.

Writes ``fixtures/corpus/*.py`` (500 function definitions in total, most with
docstrings) and ``fixtures/code2code/<problem>/<solution>.py`` (problems with
several alternative implementations each). Output is deterministic.

    python3 scripts/make_fixture.py
"""

import os
import random
import shutil

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "fixtures")
TOTAL_FUNCTIONS = 500

ENTITIES = [
    ("order", "orders"), ("invoice", "invoices"), ("package", "packages"),
    ("sensor", "sensors"), ("user", "users"), ("account", "accounts"),
    ("ticket", "tickets"), ("student", "students"), ("employee", "employees"),
    ("product", "products"), ("vehicle", "vehicles"), ("city", "cities"),
    ("book", "books"), ("song", "songs"), ("server", "servers"),
    ("task", "tasks"), ("message", "messages"), ("flight", "flights"),
    ("patient", "patients"), ("recipe", "recipes"), ("planet", "planets"),
    ("record", "records"), ("image", "images"), ("device", "devices"),
    ("course", "courses"), ("game", "games"), ("payment", "payments"),
    ("shipment", "shipments"), ("event", "events"), ("team", "teams"),
    ("sample", "samples"), ("room", "rooms"), ("card", "cards"),
    ("route", "routes"), ("store", "stores"), ("asset", "assets"),
]

NUMERIC = [
    "price", "weight", "score", "age", "size", "duration", "distance",
    "height", "speed", "balance", "rating", "temperature", "capacity",
    "priority", "length", "volume", "cost", "level", "salary", "quantity",
]

TEXTUAL = ["name", "title", "label", "status", "category", "owner", "color", "region", "email", "code"]


def cap(word):
    return word[0].upper() + word[1:]


# Each template returns (summary, signature line, body lines).
def t_total(e, es, a, s):
    return (f"Compute the total {a} of the given {es}.",
            f"def total_{e}_{a}({es}):",
            ["total = 0", f"for {e} in {es}:", f"    total += {e}.{a}", "return total"])


def t_average(e, es, a, s):
    return (f"Return the average {a} across all {es}.",
            f"def average_{a}({es}):",
            [f"if not {es}:", "    return 0.0",
             f"total = sum({e}.{a} for {e} in {es})", f"return total / len({es})"])


def t_max(e, es, a, s):
    return (f"Find the {e} with the highest {a}.",
            f"def find_max_{a}_{e}({es}):",
            ["best = None", f"for {e} in {es}:",
             f"    if best is None or {e}.{a} > best.{a}:", f"        best = {e}", "return best"])


def t_min(e, es, a, s):
    return (f"Find the {e} with the lowest {a}.",
            f"def find_min_{a}_{e}({es}):",
            [f"lowest = {es}[0]", f"for {e} in {es}[1:]:",
             f"    if {e}.{a} < lowest.{a}:", f"        lowest = {e}", "return lowest"])


def t_filter(e, es, a, s):
    return (f"Select {es} whose {a} exceeds the threshold.",
            f"def filter_{es}_by_{a}({es}, threshold):",
            ["selected = []", f"for {e} in {es}:", f"    if {e}.{a} > threshold:",
             f"        selected.append({e})", "return selected"])


def t_sort(e, es, a, s):
    return (f"Sort the {es} by {a} in descending order.",
            f"def sort_{es}_by_{a}({es}):",
            [f"ordered = sorted({es}, key=lambda {e}: {e}.{a}, reverse=True)", "return ordered"])


def t_count(e, es, a, s):
    return (f"Count how many {es} have a {a} below the limit.",
            f"def count_{es}_below(limit, {es}):",
            ["count = 0", f"for {e} in {es}:", f"    if {e}.{a} < limit:",
             "        count += 1", "return count"])


def t_normalize(e, es, a, s):
    return (f"Scale every {e} {a} into the unit interval.",
            f"def normalize_{a}({es}):",
            [f"values = [{e}.{a} for {e} in {es}]", "low, high = min(values), max(values)",
             "span = high - low or 1", f"for {e} in {es}:",
             f"    {e}.{a} = ({e}.{a} - low) / span", f"return {es}"])


def t_group(e, es, a, s):
    return (f"Group the {es} by their {s}.",
            f"def group_{es}_by_{s}({es}):",
            ["groups = {}", f"for {e} in {es}:",
             f"    groups.setdefault({e}.{s}, []).append({e})", "return groups"])


def t_lookup(e, es, a, s):
    return (f"Look up the first {e} matching the given {s}.",
            f"def lookup_{e}({es}, {s}):",
            [f"for {e} in {es}:", f"    if {e}.{s} == {s}:", f"        return {e}", "return None"])


def t_distinct(e, es, a, s):
    return (f"Collect the distinct {s} values of the {es}.",
            f"def distinct_{s}s({es}):",
            ["seen = set()", "result = []", f"for {e} in {es}:",
             f"    if {e}.{s} not in seen:", f"        seen.add({e}.{s})",
             f"        result.append({e}.{s})", "return result"])


def t_index(e, es, a, s):
    return (f"Build a mapping from {s} to {e}.",
            f"def index_{es}_by_{s}({es}):",
            [f"index = {{}}", f"for {e} in {es}:", f"    index[{e}.{s}] = {e}", "return index"])


def t_increase(e, es, a, s):
    return (f"Increase the {a} of each {e} by a fixed amount.",
            f"def increase_{a}({es}, amount):",
            [f"for {e} in {es}:", f"    {e}.{a} += amount",
             f"    log_change({e}, \"{a}\", amount)"])


def t_validate(e, es, a, s):
    return (f"Check that every {e} has a positive {a}.",
            f"def validate_{es}({es}):",
            [f"invalid = [{e} for {e} in {es} if {e}.{a} <= 0]",
             "if invalid:", f"    raise ValueError(\"invalid {a}\")", "return True"])


def t_report(e, es, a, s):
    return (f"Format a short report line for the {e}.",
            f"def format_{e}_report({e}):",
            [f"header = {e}.{s}.upper()", f"value = round({e}.{a}, 2)",
             "return f\"{header}: {value}\""])


def t_split(e, es, a, s):
    return (f"Split the {es} into two lists based on {a}.",
            f"def partition_{es}({es}, pivot):",
            ["lower, upper = [], []", f"for {e} in {es}:", f"    if {e}.{a} < pivot:",
             f"        lower.append({e})", "    else:", f"        upper.append({e})",
             "return lower, upper"])


def t_running(e, es, a, s):
    return (f"Compute the running total of {e} {a} values.",
            f"def running_{a}({es}):",
            ["totals = []", "current = 0", f"for {e} in {es}:", f"    current += {e}.{a}",
             "    totals.append(current)", "return totals"])


def t_topk(e, es, a, s):
    return (f"Return the top k {es} ranked by {a}.",
            f"def top_{es}({es}, k=3):",
            [f"ranked = sorted({es}, key=lambda item: item.{a})", "ranked.reverse()", "return ranked[:k]"])


def t_median(e, es, a, s):
    return (f"Compute the median {a} of the {es}.",
            f"def median_{a}({es}):",
            [f"values = sorted({e}.{a} for {e} in {es})", "middle = len(values) // 2",
             "if len(values) % 2 == 1:", "    return values[middle]",
             "return (values[middle - 1] + values[middle]) / 2"])


def t_parse(e, es, a, s):
    return (f"Parse a {e} record from a comma separated line.",
            f"def parse_{e}(line):",
            [f"{s}, raw_{a} = line.strip().split(\",\")",
             f"{e} = {cap(e)}({s}={s}.strip(), {a}=float(raw_{a}))", f"return {e}"])


def t_nested(e, es, a, s):
    return (f"Rank {es} using a custom {a} key.",
            f"def rank_{es}({es}, weight=1.0):",
            [f"def key({e}):", f"    return {e}.{a} * weight",
             f"ranked = sorted({es}, key=key)", "return ranked"])


def t_merge(e, es, a, s):
    return (f"Merge two lists of {es} keeping the larger {a} per {s}.",
            f"def merge_{es}(left, right):",
            ["merged = {}", f"for {e} in left + right:", f"    current = merged.get({e}.{s})",
             f"    if current is None or {e}.{a} > current.{a}:", f"        merged[{e}.{s}] = {e}",
             "return list(merged.values())"])


TEMPLATES = [
    t_total, t_average, t_max, t_min, t_filter, t_sort, t_count, t_normalize, t_group,
    t_lookup, t_distinct, t_index, t_increase, t_validate, t_report, t_split, t_running,
    t_topk, t_median, t_parse, t_nested, t_merge,
]

NON_ENGLISH = [
    "Вычисляет сумму значений для всех элементов.",
    "计算所有元素的总和并返回结果。",
    "Berechnet die Summe über alle Einträge äöü ß für die Ausgabe.",
]


def indent(lines, n):
    pad = " " * n
    return [pad + line if line else "" for line in lines]


def docstring_lines(rng, summary, e, es, a, s):
    style = rng.random()
    if style < 0.55:
        return [f'"""{summary}"""']
    if style < 0.75:
        return ['"""' + summary, "", f":param {es}: the {es} to inspect", '"""']
    if style < 0.85:
        return ['"""' + summary + f" See https://docs.example.com/{es} for details.", "", "Extra notes.", '"""']
    if style < 0.93:
        return ['"""' + summary.replace(a, f"<b>{a}</b>", 1), '"""']
    return ['"""' + summary, "", f"@param {es} list of {es}", f"@return computed {a}", '"""']


def render_function(rng, body_indent, with_doc=True, doc_override=None):
    e, es = rng.choice(ENTITIES)
    a = rng.choice(NUMERIC)
    s = rng.choice(TEXTUAL)
    template = rng.choice(TEMPLATES)
    summary, signature, code = template(e, es, a, s)
    lines = [signature]
    if doc_override is not None:
        lines += indent([f'"""{doc_override}"""'], 4)
    elif with_doc:
        lines += indent(docstring_lines(rng, summary, e, es, a, s), 4)
    if rng.random() < 0.15:
        lines += indent([f"# walk the {es} once"], 4)
    lines += indent(code, 4)
    return indent(lines, body_indent)


def render_class(rng):
    e, es = rng.choice(ENTITIES)
    a = rng.choice(NUMERIC)
    s = rng.choice(TEXTUAL)
    name = cap(e) + "Registry"
    lines = [
        f"class {name}:",
        f'    """Keep track of {es} by {s}."""',
        "",
        "    def __init__(self):",
        f'        """Create an empty registry of {es}."""',
        f"        self.items = {{}}",
        "        self.total = 0",
        "",
        f"    def add(self, {e}):",
        f'        """Register a new {e} in the registry."""',
        f"        self.items[{e}.{s}] = {e}",
        f"        self.total += {e}.{a}",
        "",
        f"    def remove(self, {s}):",
        f'        """Remove the {e} with the given {s}."""',
        f"        {e} = self.items.pop({s}, None)",
        f"        if {e} is not None:",
        f"            self.total -= {e}.{a}",
        f"        return {e}",
        "",
        f"    def get_{a}(self):",
        f'        """Return the tracked {a}."""',
        f"        return self.total",
        "",
    ]
    return lines, 4


def make_corpus(rng):
    out_dir = os.path.join(ROOT, "corpus")
    files = []
    count = 0
    file_index = 0
    while count < TOTAL_FUNCTIONS:
        lines = ["import math", "from collections import defaultdict", "", ""]
        per_file = rng.randint(6, 12)
        produced = 0
        while produced < per_file and count + produced < TOTAL_FUNCTIONS:
            roll = rng.random()
            remaining = TOTAL_FUNCTIONS - count - produced
            if roll < 0.08 and remaining >= 4:
                block, n = render_class(rng)
                lines += block
                lines += [""]
                produced += n
                continue
            if roll < 0.16:
                block = render_function(rng, 0, with_doc=False)
            elif roll < 0.18:
                block = render_function(rng, 0, doc_override=rng.choice(NON_ENGLISH))
            elif roll < 0.21:
                e, es = rng.choice(ENTITIES)
                block = [f"def is_empty_{es}({es}):", f'    """Tell whether there are no {es}."""',
                         f"    return len({es}) == 0"]
            else:
                block = render_function(rng, 0)
            defs = sum(1 for line in block if line.lstrip().startswith("def "))
            if defs > remaining:
                continue
            lines += block
            lines += ["", ""]
            produced += defs
        count += produced
        while lines and lines[-1] == "":
            lines.pop()
        files.append((f"module_{file_index:03d}.py", "\n".join(lines) + "\n"))
        file_index += 1
    for name, text in files:
        with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(text)
    return count


# Alternative implementations of the same computation, for Code2Code grouping.
def variants(e, es, a, s):
    return [
        ("total", [
            [f"def total_{a}({es}):", "    total = 0", f"    for {e} in {es}:", f"        total += {e}.{a}", "    return total"],
            [f"def sum_{a}({es}):", f"    return sum({e}.{a} for {e} in {es})"],
            [f"def accumulate_{a}(items):", "    result = 0", "    index = 0", "    while index < len(items):",
             f"        result = result + items[index].{a}", "        index += 1", "    return result"],
        ]),
        ("maximum", [
            [f"def max_{a}({es}):", f"    return max({e}.{a} for {e} in {es})"],
            [f"def highest_{a}({es}):", "    best = None", f"    for {e} in {es}:",
             f"        if best is None or {e}.{a} > best:", f"            best = {e}.{a}", "    return best"],
            [f"def peak(values):", f"    ordered = sorted(v.{a} for v in values)", "    return ordered[-1]"],
        ]),
        ("grouping", [
            [f"def group_by_{s}({es}):", "    groups = {}", f"    for {e} in {es}:",
             f"        groups.setdefault({e}.{s}, []).append({e})", "    return groups"],
            [f"def bucket_{es}({es}):", "    buckets = defaultdict(list)", f"    for {e} in {es}:",
             f"        buckets[{e}.{s}].append({e})", "    return dict(buckets)"],
        ]),
        ("filtering", [
            [f"def above({es}, limit):", f"    return [{e} for {e} in {es} if {e}.{a} > limit]"],
            [f"def keep_large({es}, limit):", "    kept = []", f"    for {e} in {es}:",
             f"        if {e}.{a} > limit:", f"            kept.append({e})", "    return kept"],
            [f"def select(items, limit):", f"    return list(filter(lambda x: x.{a} > limit, items))"],
        ]),
    ]


def make_code2code(rng):
    out_dir = os.path.join(ROOT, "code2code")
    problem = 0
    used = set()
    while problem < 20:
        e, es = rng.choice(ENTITIES)
        a = rng.choice(NUMERIC)
        s = rng.choice(TEXTUAL)
        kind, sols = rng.choice(variants(e, es, a, s))
        if (kind, e, a) in used:
            continue
        used.add((kind, e, a))
        pdir = os.path.join(out_dir, f"problem_{problem:02d}")
        os.makedirs(pdir)
        for j, sol in enumerate(sols):
            with open(os.path.join(pdir, f"solution_{j}.py"), "w", encoding="utf-8") as fh:
                fh.write("\n".join(sol) + "\n")
        problem += 1
    # a singleton group, dropped by the dataset builder
    pdir = os.path.join(out_dir, "problem_single")
    os.makedirs(pdir)
    with open(os.path.join(pdir, "solution_0.py"), "w", encoding="utf-8") as fh:
        fh.write("def lonely(x):\n    return x + 1\n")


def main():
    rng = random.Random(20240117)
    for sub in ("corpus", "code2code"):
        path = os.path.join(ROOT, sub)
        shutil.rmtree(path, ignore_errors=True)
        os.makedirs(path)
    n = make_corpus(rng)
    make_code2code(rng)
    print(f"wrote {n} functions")


if __name__ == "__main__":
    main()
