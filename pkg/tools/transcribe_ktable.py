"""Regenerate src/spherical_hecke/data/ktable-genus4.json from the hand
transcription below.

Each entry is (k, sign, x0 power, p power, groups); a group is a coefficient
polynomial in p (sympy syntax) followed by the partitions it multiplies.
An empty partition ``""`` stands for the plain constant 1.

    python tools/transcribe_ktable.py
"""

import json
import pathlib

import sympy

TABLE = [
    (0, 1, 0, 0, [("1", [""])]),
    (1, 1, 1, 0, []),
    (2, -1, 2, -2, [
        ("p", ["2211", "2110", "1100"]),
        ("p**2+p+1", ["2111", "1110"]),
        ("2*p**2+4*p+1", ["1111"]),
    ]),
    (3, 1, 3, -3, [
        ("p**2+p", ["3222", "3221", "3211", "3111", "2220", "2210", "2110", "1110"]),
        ("p**3+5*p**2+5*p+1", ["2222", "2221", "2211", "2111", "1111"]),
    ]),
    (4, -1, 4, -4, [
        ("p**2", ["4322", "4221", "3220", "2210"]),
        ("p*(p**2+p+1)", ["4222", "3333", "3331", "3311", "3111", "2220", "1111"]),
        ("p*(p**2+4*p+1)", ["3332", "3321", "3211", "2111"]),
        ("p*(3*p**2+6*p+4)", ["3322", "3221", "2211"]),
        ("5*p**3+15*p**2+6*p+1", ["3222", "2221"]),
        ("12*p**3+22*p**2+16*p+1", ["2222"]),
    ]),
    (5, 1, 5, -4, [
        ("p**2+p", ["4433", "4432", "4422", "4331", "4321", "4221", "3311", "3211", "2211"]),
        ("4*p**2+5*p+1", ["4333", "4332", "4322", "4222", "3331", "3321", "3221", "2221"]),
        ("-p**4+14*p**2+18*p+5", ["3333", "3332", "3322", "3222", "2222"]),
    ]),
    (6, 1, 6, -6, [
        ("p**2*(p**3-5*p-4)", ["4432", "4322", "3222", "4443"]),
        ("p*(p**5+5*p**4-17*p**2-15*p-1)", ["4333", "3332"]),
        ("-p**2*(p+1)", ["4331", "3321", "5332", "5433"]),
        ("p*(3*p**4-12*p**2-6*p-1)", ["4332", "3322", "4433"]),
        ("p**2*(p**3-3*p-1)", ["4222", "3331", "2222", "4422", "4442", "4444", "5333"]),
        ("p**3", ["6333"]),
        ("-p**3", ["5443", "5432", "5322", "4431", "4321"]),
        ("p**3", ["3330"]),
        ("-p**3", ["3221"]),
        ("2*p**6+12*p**5-32*p**3-22*p**2-4*p+1", ["3333"]),
    ]),
    (7, -1, 7, -5, [
        ("p*(p**2-1)", ["5544", "5543", "5533", "5442", "5432", "5332", "4422", "4322", "3322"]),
        ("p**4+4*p**3-4*p-1", ["5444", "5443", "5433", "5333", "4442", "4432", "4332", "3332"]),
        ("5*p**4+14*p**3-14*p-5", ["4444", "4443", "4433", "4333", "3333"]),
    ]),
    (8, 1, 8, -6, [
        ("p**5+15*p**4+17*p**3-5*p-1", ["5444", "4443"]),
        ("-p**3", ["7444"]),
        ("p**3", ["6554", "6543", "6433", "5542", "5432"]),
        ("-p**3", ["4441"]),
        ("p**3", ["4332"]),
        ("p*(4*p**3+5*p**2-1)", ["5554", "5543", "5433", "4333"]),
        ("p**3*(p+1)", ["6544", "6443", "5442", "4432"]),
        ("p*(p**3+3*p**2-1)", ["4442", "5333", "5533", "5555", "6444", "5553", "3333"]),
        ("-(p**6-4*p**5-22*p**4-32*p**3+12*p+2)", ["4444"]),
        ("p*(p**4+6*p**3+12*p**2-3)", ["5544", "5443", "4433"]),
    ]),
    (9, -1, 9, -6, [
        ("p**2*(p+1)", ["6655", "6654", "6644", "6553", "6543", "6443", "5533", "5433", "4433"]),
        ("p**2*(p**2+5*p+4)", ["6555", "6554", "6544", "6444", "5553", "5543", "5443", "4443"]),
        ("5*p**4+18*p**3+14*p**2-1", ["5555", "5554", "5544", "5444", "4444"]),
    ]),
    (10, 1, 10, -5, [
        ("p**2+p+1", ["4444", "5553", "6444", "6644", "6664", "6666", "7555"]),
        ("p**2+4*p+1", ["5444", "6544", "6654", "6665"]),
        ("p", ["5543", "6553", "7554", "7655"]),
        ("4*p**2+6*p+3", ["5544", "6554", "6655"]),
        ("p**3+6*p**2+15*p+5", ["5554", "6555"]),
        ("p**3+16*p**2+22*p+12", ["5555"]),
    ]),
    (11, -1, 11, -6, [
        ("p**2+p", ["7666", "7665", "7655", "7555", "6664", "6654", "6554", "5554"]),
        ("p**3+5*p**2+5*p+1", ["6666", "6665", "6655", "6555", "5555"]),
    ]),
    (12, 1, 12, -6, [
        ("p**2+p+1", ["6665", "7666"]),
        ("p**2+4*p+2", ["6666"]),
        ("p", ["7665", "7766", "6655"]),
    ]),
    (13, 1, 13, 0, []),
    (14, -1, 14, -6, [("1", ["7777"])]),
]


def pcoeff_json(expr: str) -> list:
    p = sympy.Symbol("p")
    poly = sympy.Poly(sympy.expand(sympy.sympify(expr)), p)
    terms = []
    for (k,), c in sorted(poly.terms(), reverse=True):
        c = sympy.Rational(c)
        terms.append({"c": [int(c.p), int(c.q)],
                      "e": {"p": int(k), "x0": 0, "x1": 0, "x2": 0, "x3": 0, "x4": 0, "X": 0}})
    return terms


def main() -> None:
    entries = []
    for k, sign, x0pow, ppow, groups in TABLE:
        terms = []
        for expr, parts in groups:
            for part in parts:
                terms.append({"pcoeff": pcoeff_json(expr),
                              "partition": [int(ch) for ch in part]})
        entries.append({"k": k, "sign": sign, "x0pow": x0pow, "ppow": ppow, "terms": terms})
    out = {"format": "ktable", "version": 1, "genus": 4, "entries": entries}
    path = pathlib.Path(__file__).resolve().parents[1] / "src/spherical_hecke/data/ktable-genus4.json"
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
