"""End-to-end checks of the treelogic command line: exit codes, outputs,
JSON schema conformance, determinism and error reporting.

Usage: check_cli.py <treelogic binary> <source dir>
"""

import json
import os
import subprocess
import sys
import tempfile

import jsonschema

BIN, SRC = sys.argv[1], sys.argv[2]
with open(os.path.join(SRC, "schemas", "result.schema.json")) as f:
    SCHEMA = json.load(f)
jsonschema.Draft202012Validator.check_schema(SCHEMA)
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)

failures = []
checks = 0


def run(*args):
    p = subprocess.run([BIN, *args], capture_output=True, text=True, timeout=120)
    return p.returncode, p.stdout, p.stderr


def expect(cond, what):
    global checks
    checks += 1
    if not cond:
        failures.append(what)
        print("FAIL", what)


def expect_run(args, code, stdout_has=None):
    rc, out, err = run(*args)
    expect(rc == code, f"{args}: exit {rc}, wanted {code} (stderr: {err.strip()})")
    if stdout_has is not None:
        expect(stdout_has in out, f"{args}: {stdout_has!r} not in output {out!r}")
    return out, err


def expect_error(args, code, kind):
    rc, out, err = run(*args)
    expect(rc == code, f"{args}: exit {rc}, wanted {code}")
    lines = err.splitlines()
    expect(len(lines) == 1 and lines[0].startswith(f"error: {kind}: "),
           f"{args}: stderr is not one 'error: {kind}:' line: {err!r}")
    expect(out == "", f"{args}: unexpected stdout on error: {out!r}")


def json_run(args, code):
    rc, out, err = run(*args, "--format", "json")
    expect(rc == code, f"{args} json: exit {rc}, wanted {code} (stderr: {err.strip()})")
    try:
        doc = json.loads(out)
    except json.JSONDecodeError as e:
        expect(False, f"{args}: output is not JSON: {e}")
        return None
    errors = list(VALIDATOR.iter_errors(doc))
    expect(not errors, f"{args}: schema violation: {[e.message for e in errors]}")
    return doc


def without_millis(text):
    doc = json.loads(text)
    doc["stats"].pop("millis")
    return doc


tmp = tempfile.mkdtemp()


def write(name, text):
    path = os.path.join(tmp, name)
    with open(path, "w") as f:
        f.write(text)
    return path


ABC = write("abc.dtd", "<!ELEMENT a (b|c)*>\n<!ELEMENT b EMPTY>\n<!ELEMENT c EMPTY>\n")
BC = write("bc.dtd", "<!ELEMENT a (b*)>\n<!ELEMENT b (c*)>\n<!ELEMENT c EMPTY>\n")
NESTED = write("nested.dtd", "<!DOCTYPE r [\n<!ELEMENT r (a|c)*>\n<!ELEMENT a (b|a)*>\n"
               "<!ELEMENT b EMPTY>\n<!ELEMENT c (c*)>\n]>\n")
BTYPE = write("b.type", "B -> b(C*)\nC -> c()\n")
BTYPE_STRICT = write("b_strict.type", "B -> b(C?)\nC -> c()\n")
ARTICLE = os.path.join(SRC, "data", "article.dtd")

# Verdicts and exit codes.
expect_run(["contains", "--q1", "/a/b", "--q2", "/a/*"], 0, "holds")
out, _ = expect_run(["contains", "--q1", "//b", "--q2", "/b"], 1, "fails")
expect("/b[1]" in out, "containment counterexample marks a b element")
expect_run(["contains", "--q1", "//b", "--q2", "//a//b"], 1, "fails")
expect_run(["contains", "--q1", "//b", "--q2", "//a//b", "--dtd", NESTED], 0, "holds")
expect_run(["empty", "--query", "/a/b"], 1, "fails")
expect_run(["empty", "--query", "/a/self::b"], 0, "holds")
expect_run(["equiv", "--q1", "a | b", "--q2", "b | a"], 0, "holds")
expect_run(["equiv", "--q1", "/a/b", "--q2", "/a/*"], 1, "fails")
expect_run(["overlap", "--q1", "/a/b", "--q2", "/a/*"], 0, "holds")
expect_run(["overlap", "--q1", "/a", "--q2", "/b"], 1, "fails")
expect_run(["covers", "--query", "/a/*", "--covering", "/a/b", "--covering", "/a/c", "--dtd", ABC], 0, "holds")
expect_run(["covers", "--query", "/a/*", "--covering", "/a/b", "--covering", "/a/c"], 1, "fails")
expect_run(["typecheck", "--query", "//b", "--dtd", BC, "--expected-labels", "b"], 0, "holds")
expect_run(["typecheck", "--query", "/a/*", "--dtd", ABC, "--expected-labels", "b"], 1, "<a><c/></a>")
expect_run(["typecheck", "--query", "//b", "--dtd", BC, "--expected-type", BTYPE], 0, "holds")
expect_run(["typecheck", "--query", "//b", "--dtd", BC, "--expected-type", BTYPE_STRICT], 1, "fails")
expect_run(["typecheck", "--query", "//title", "--dtd", ARTICLE, "--expected-labels", "title"], 0, "holds")
expect_run(["sat", "--formula", "a & <1>b"], 0, "satisfiable")
expect_run(["sat", "--formula", "a & ~a"], 0, "unsatisfiable")
expect_run(["sat", "--formula", "a & <1>b", "--stats"], 0, "lean")

# Errors: one line on stderr, nothing on stdout.
expect_error(["contains", "--q1", "a"], 2, "usage")
expect_error([], 2, "usage")
expect_error(["empty", "--query", "a["], 2, "syntax")
expect_error(["empty", "--query", "a", "--dtd", os.path.join(tmp, "missing.dtd")], 2, "usage")
expect_error(["sat", "--formula", "mu X. <1><-1>X | a"], 2, "not-cycle-free")
expect_error(["empty", "--query", "//a[. = 'x']"], 2, "unsupported")
expect_error(["typecheck", "--query", "//b", "--expected-labels", "b", "--expected-type", BTYPE], 2, "input")
expect_error(["sat", "--formula", "mu X. <1>(a & <2>(b & <1>X | c)) | mu Y. <2>(<1>Y | b & <1>(a & <2>c))",
              "--max-nodes", "50"], 3, "resource-limit")

# JSON conformance over the examples and seeded corpora.
doc = json_run(["contains", "--q1", "//b", "--q2", "/b"], 1)
expect(doc and doc["verdict"] == "fails" and doc["markedNodePath"].endswith("/b[1]"), "json containment")
doc = json_run(["contains", "--q1", "/a/b", "--q2", "/a/*"], 0)
expect(doc and doc["counterexample"] is None and doc["markedNodePath"] is None, "json holds has no counterexample")
doc = json_run(["overlap", "--q1", "/a/b", "--q2", "/a/*"], 0)
expect(doc and doc["counterexample"] == "<a><b/></a>", "json overlap witness")
json_run(["sat", "--formula", "a & ~a"], 0)
json_run(["typecheck", "--query", "//b", "--dtd", BC, "--expected-type", BTYPE_STRICT], 1)

_, queries, _ = run("gen", "--kind", "xpath", "--seed", "31", "--count", "30")
queries = queries.splitlines()
expect(len(queries) == 30, "gen xpath count")
for q1, q2 in zip(queries[0::2], queries[1::2]):
    rc, _, _ = run("contains", "--q1", q1, "--q2", q2)
    json_run(["contains", "--q1", q1, "--q2", q2], rc)
    expect(rc in (0, 1), f"contains {q1} {q2}: exit {rc}")
_, formulas, _ = run("gen", "--kind", "formulas", "--seed", "31", "--count", "20")
for f in formulas.splitlines():
    doc = json_run(["sat", "--formula", f], 0)
    expect(doc is None or doc["problem"] == "sat", f"sat {f}")

# Generated DTDs are accepted as constraints.
_, dtds, _ = run("gen", "--kind", "dtd", "--seed", "31", "--count", "5")
for i, block in enumerate(dtds.split("]>\n")[:-1]):
    path = write(f"gen{i}.dtd", block + "]>\n")
    rc, _, err = run("empty", "--query", "//*", "--dtd", path)
    expect(rc in (0, 1), f"generated DTD {i} rejected: {err.strip()}")
_, bench_dtd, _ = run("gen", "--kind", "bench-dtd")
with open(ARTICLE) as f:
    expect(bench_dtd == f.read(), "gen bench-dtd prints data/article.dtd")

# Repeated invocations agree byte for byte, apart from timings.
for args in (["contains", "--q1", "//b", "--q2", "/b"], ["equiv", "--q1", "/a/b", "--q2", "/a/*"],
             ["sat", "--formula", "mu X. b | <1>X | <2>X"]):
    text = [run(*args)[1] for _ in range(3)]
    expect(text[0] == text[1] == text[2], f"{args}: text output differs between runs")
    js = [without_millis(run(*args, "--format", "json")[1]) for _ in range(3)]
    expect(js[0] == js[1] == js[2], f"{args}: json output differs between runs")
expect(run("gen", "--kind", "formulas", "--seed", "4")[1] == run("gen", "--kind", "formulas", "--seed", "4")[1],
       "gen is deterministic")

# The performance suite.
rc, out, _ = run("bench")
expect(rc == 0 and out.splitlines()[-1].startswith("PASS"), "bench passes")

print(f"{checks - len(failures)}/{checks} CLI checks passed")
sys.exit(1 if failures else 0)
