"""
AST nodes shared by summands, closed forms and congruence right-hand sides,
plus the Term normal form summands are expanded into.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple, Union


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Name:
    """Bare named constant such as pi or G."""
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Node", ...]


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


Node = Union[Num, Var, Name, Call, Neg, BinOp]

# Names recognised as constants in closed forms
CONSTANT_NAMES = ("pi", "G", "K", "L", "phi", "log2")
# Functions of closed forms
CLOSED_FORM_FUNCTIONS = ("sqrt", "log", "exp", "zeta", "beta", "Gamma")
# Atoms only meaningful on congruence right-hand sides
CONGRUENCE_FUNCTIONS = ("kron", "q", "B", "E", "H")
# Summand building blocks
SUMMAND_FUNCTIONS = ("C", "H", "OddH", "AltH")

MAX_HARMONIC_ORDER = 8


def free_vars(node: Node) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Neg):
        return free_vars(node.operand)
    if isinstance(node, BinOp):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Call):
        out = set()
        for arg in node.args:
            out |= free_vars(arg)
        return out
    return set()


def substitute(node: Node, env: dict) -> Node:
    """Replace free parameters by rational literals."""
    if not env:
        return node
    if isinstance(node, Var):
        return Num(Fraction(env[node.name])) if node.name in env else node
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, env))
    if isinstance(node, BinOp):
        return BinOp(node.op, substitute(node.left, env), substitute(node.right, env))
    if isinstance(node, Call):
        return Call(node.name, tuple(substitute(a, env) for a in node.args))
    return node


# ---------------------------------------------------------------------------
# Term normal form
# ---------------------------------------------------------------------------

Poly = Tuple[Fraction, ...]  # coefficients c0, c1, ... in k


@dataclass(frozen=True)
class HForm:
    """Affine harmonic combination: sum of coeff * H_{mult*k+shift}^(order), plus c0."""
    items: Tuple[Tuple[Tuple[int, int, int], Fraction], ...]
    c0: Fraction = Fraction(0)

    @property
    def keys(self) -> Tuple[Tuple[int, int, int], ...]:
        return tuple(key for key, _ in self.items)

    def is_unit(self) -> bool:
        return len(self.items) == 1 and self.items[0][1] == 1 and self.c0 == 0


@dataclass(frozen=True)
class Term:
    """
    poly(k) * prod (den_f(k))^-n * prod C(a k + a0, b k + b0)^e * base^k * hf(k) * seq(k) * p^j * const.

    `denominators` holds primitive integer polynomials with positive leading
    coefficient, `base_irr` and `const` are closed-form nodes (identity records only).
    """
    poly: Poly
    denominators: Tuple[Tuple[Tuple[int, ...], int], ...] = ()
    binoms: Tuple[Tuple[Tuple[int, int, int, int], int], ...] = ()
    base: Fraction = Fraction(1)
    base_irr: Optional[Node] = None
    hf: Optional[HForm] = None
    seq: Optional[str] = None
    p_power: int = 0
    const: Optional[Node] = None

    def signature(self) -> tuple:
        """Everything except the polynomial; like terms share a signature."""
        return (
            self.denominators, self.binoms, self.base, self.base_irr,
            self.hf, self.seq, self.p_power, self.const,
        )

    @property
    def is_rational(self) -> bool:
        return self.base_irr is None and self.const is None


@dataclass(frozen=True)
class SummandExpr:
    terms: Tuple[Term, ...]
    text: str = field(default="", compare=False)

    @property
    def is_rational(self) -> bool:
        return all(t.is_rational for t in self.terms)

    @property
    def uses_p(self) -> bool:
        return any(t.p_power for t in self.terms)

    @property
    def sequences(self) -> Tuple[str, ...]:
        return tuple(sorted({t.seq for t in self.terms if t.seq}))


@dataclass(frozen=True)
class ClosedFormExpr:
    node: Node
    text: str = field(default="", compare=False)


@dataclass(frozen=True)
class CongruenceRHS:
    node: Node
    text: str = field(default="", compare=False)
