"""Random processes, states and a fixed corpus for oracle-style tests."""

from fractions import Fraction

from faker import Faker

from hcsp_tools.lang.ast import (
    ODE,
    Assign,
    CommBranch,
    Cond,
    IChoice,
    Input,
    Interrupt,
    Output,
    Process,
    Repeat,
    Seq,
    Skip,
    Wait,
)
from hcsp_tools.lang.parser import parse
from hcsp_tools.symbolic.evaluate import State
from hcsp_tools.symbolic.expr import (
    Add,
    And,
    BExpr,
    Cmp,
    Const,
    Expr,
    Implies,
    Mul,
    Not,
    Or,
    Sub,
    Var,
)

VARS = ["x", "y", "z"]
CHANNELS = ["ch1", "ch2"]

# Sequential programs with continuous evolution and interrupts.
CORPUS = [
    "<x_dot = 1 & x < 5>",
    "x := 0; <x_dot = 2, y_dot = 1 & x < 3>; ch1!y",
    "x := 0; y := 0; <x_dot = y, y_dot = 1 & x < 8>",
    "<x_dot = 1 & x < 3> |> [] (ch1?y -> skip, ch2!x -> wait 1)",
    "(ch1?z; <y_dot = z & true> |> [] (ch2!y -> skip))*",
    "if x < 0 then x := -x else skip endif; wait x",
    "x := 1 $ (ch1?x; x := x + 1)",
    "(wait 1; ch2!x; x := x * 2)*; ch1?y",
    "<x_dot = 1, y_dot = -1 & x < 2 |> z := x + y> |> [] (ch1?z -> z := z - 1)",
]


def random_expr(fake: Faker, depth: int) -> Expr:
    if depth == 0 or fake.boolean(30):
        if fake.boolean():
            return Var(fake.random_element(VARS))
        return Const(Fraction(fake.random_int(0, 9)))
    op = fake.random_element([Add, Sub, Mul])
    return op(random_expr(fake, depth - 1), random_expr(fake, depth - 1))


def random_bexpr(fake: Faker, depth: int) -> BExpr:
    if depth == 0 or fake.boolean(30):
        op = fake.random_element(["<", "<=", ">", ">=", "=="])
        return Cmp(op, random_expr(fake, 2), random_expr(fake, 2))
    kind = fake.random_int(0, 3)
    if kind == 0:
        return Not(random_bexpr(fake, depth - 1))
    op = (And, Or, Implies)[kind - 1]
    return op(random_bexpr(fake, depth - 1), random_bexpr(fake, depth - 1))


def random_equations(fake: Faker) -> tuple[tuple[str, Expr], ...]:
    """A guarded variable with a positive constant rate, maybe one more riding on it.

    The domain only ever bounds the first variable, so exit times stay rational.
    """
    x, y, z = fake.random_elements(VARS, length=3, unique=True)
    eqs = [(x, Const(Fraction(fake.random_int(1, 3))))]
    if fake.boolean():
        rate = fake.random_element([Const(Fraction(fake.random_int(0, 4))), Var(x), Var(z)])
        eqs.append((y, rate))
    return tuple(eqs)


def random_evolution(fake: Faker) -> Process:
    eqs = random_equations(fake)
    domain = Cmp("<", Var(eqs[0][0]), Const(Fraction(fake.random_int(0, 9))))
    if fake.boolean():
        return ODE(eqs, domain)
    tail = fake.random_element([Skip(), Assign(fake.random_element(VARS), random_expr(fake, 1))])
    branches = []
    for ch in fake.random_elements(CHANNELS, length=fake.random_int(1, 2), unique=True):
        cont = fake.random_element([Skip(), Wait(Const(Fraction(fake.random_int(0, 3))))])
        if fake.boolean():
            branches.append(CommBranch("?", ch, var=fake.random_element(VARS), cont=cont))
        else:
            branches.append(CommBranch("!", ch, expr=random_expr(fake, 1), cont=cont))
    return Interrupt(eqs, domain, tail, tuple(branches))


def random_process(fake: Faker, depth: int) -> Process:
    """A random sequential process; its evolutions all leave their domains at rational times."""
    x = fake.random_element(VARS)
    ch = fake.random_element(CHANNELS)
    if depth == 0:
        return fake.random_element(
            [
                Skip(),
                Assign(x, random_expr(fake, 2)),
                Input(ch, x),
                Output(ch, random_expr(fake, 1)),
                Wait(random_expr(fake, 1)),
                random_evolution(fake),
            ]
        )
    kind = fake.random_int(0, 4)
    if kind == 0:
        return Seq(random_process(fake, depth - 1), random_process(fake, depth - 1))
    if kind == 1:
        return IChoice(random_process(fake, depth - 1), random_process(fake, depth - 1))
    if kind == 2:
        return Repeat(random_process(fake, depth - 1))
    if kind == 3:
        op = fake.random_element(["<", "<=", ">", ">=", "=="])
        cond = Cmp(op, Var(x), random_expr(fake, 1))
        return Cond(cond, random_process(fake, depth - 1), random_process(fake, depth - 1))
    return random_process(fake, 0)


def random_state(fake: Faker, names=VARS) -> State:
    return State({name: Fraction(fake.random_int(-12, 12), 2) for name in names})


def corpus() -> list[Process]:
    return [parse(text) for text in CORPUS]
