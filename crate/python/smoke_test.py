"""Smoke test for the Python bindings.

Build and install first:
    pip install --no-build-isolation ./crates/python
"""

from pathlib import Path

import plhvcsp_py as p

DATA = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"


def main():
    prob = p.Problem.load(str(DATA / "max_sum.json"))
    assert prob.variables == ["x", "y", "z"], prob.variables

    d = prob.solve(threshold="0", witness=True)
    assert d.accept and d.blp_value == "0", d
    assert d.witness is not None and len(d.witness) == 3
    assert not prob.solve(threshold="-1/1000").accept

    assert prob.oracle("0")[0]
    assert not prob.oracle("-1/1000")[0]
    assert prob.infimum() == ("attained", "0")

    s = prob.sample()
    assert len(s) == len(s.domain) and s.domain == sorted(s.domain, key=lambda v: eval_rational(v))
    name, arity = prob.functions[0]
    assert len(s.table(name)) == len(s) ** arity

    again = p.Problem.from_json(prob.to_json())
    assert again.functions == prob.functions

    lp = p.LinearProgram()
    x = lp.add_variable("x")
    y = lp.add_variable("y")
    lp.set_objective(x, "-1")
    lp.set_objective(y, "-1")
    lp.add_constraint([(x, "1"), (y, "2")], "<=", "4")
    lp.add_constraint([(x, "3"), (y, "1")], "<=", "6")
    status, value, point = lp.solve()
    assert (status, value, point) == ("optimal", "-14/5", ["8/5", "6/5"]), (status, value, point)

    print("smoke test passed")


def eval_rational(s):
    from fractions import Fraction

    return Fraction(s)


if __name__ == "__main__":
    main()
