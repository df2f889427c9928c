"""Functional specifications: family, orders, weight and test function mode."""

import re
from dataclasses import dataclass, field

from ..errors import DomainError, ValidationError

FAMILIES = ("I", "J", "K", "N")
TEST_MODES = ("phi", "abs", "absgrad")


@dataclass(frozen=True)
class Weight:
    """u(x) = sign * |grad v|^grad_power * b(x)^b_power."""

    sign: int = 1
    grad_power: int = 0
    b_power: int = 0

    def __post_init__(self):
        if self.sign not in (1, -1) or self.grad_power < 0 or self.b_power < 0:
            raise ValidationError(f"invalid weight {self}")

    @classmethod
    def parse(cls, text):
        """Parse '1', '-1', '|dv|^2', '-|dv|^4', 'b', 'b^2*|dv|^2'."""
        t = text.replace(" ", "")
        sign = 1
        if t.startswith("-"):
            sign, t = -1, t[1:]
        grad = bpow = 0
        if t in ("", "1"):
            return cls(sign)
        for factor in t.split("*"):
            m = re.fullmatch(r"\|dv\|(?:\^(\d+))?", factor)
            if m:
                grad += int(m.group(1) or 1)
                continue
            m = re.fullmatch(r"b(?:\^(\d+))?", factor)
            if m:
                bpow += int(m.group(1) or 1)
                continue
            if factor != "1":
                raise ValidationError(f"cannot parse weight factor {factor!r}")
        return cls(sign, grad, bpow)

    def label(self):
        parts = []
        if self.grad_power:
            parts.append("|dv|" + (f"^{self.grad_power}" if self.grad_power != 1 else ""))
        if self.b_power:
            parts.append("b" + (f"^{self.b_power}" if self.b_power != 1 else ""))
        body = "*".join(parts) or "1"
        return ("-" if self.sign < 0 else "") + body


ONE = Weight()
MINUS_ONE = Weight(-1)


@dataclass(frozen=True)
class FunctionalSpec:
    """One of I_{k,l}, J_{k,l}, K_{k,l}, N_{k,l} with weight u and test-function mode.

    ``mode`` replaces phi by |phi| ("abs") or |grad phi| ("absgrad").
    """

    family: str
    k: int
    l: int
    weight: Weight = field(default=ONE)
    mode: str = "phi"
    testfn: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}")
        if self.mode not in TEST_MODES:
            raise ValidationError(f"unknown test mode {self.mode!r}")
        if self.k < 1:
            raise DomainError(f"{self.family}: need k >= 1, got {self.k}")
        top = self.k if self.family in ("I", "J") else self.k - 1
        if not 0 <= self.l <= top:
            raise DomainError(f"{self.family}_{{k,l}} needs 0 <= l <= {top}, got l={self.l}")
        if self.family == "N" and self.mode != "phi":
            raise ValidationError("N uses grad phi and is only defined for mode 'phi'")

    def label(self):
        mode = {"phi": "phi", "abs": "|phi|", "absgrad": "|dphi|"}[self.mode]
        return f"{self.family}_{{{self.k},{self.l}}}^({self.weight.label()})({mode})"


def I(k, l, weight=ONE, mode="phi"):
    return FunctionalSpec("I", k, l, weight, mode)


def J(k, l, weight=ONE, mode="phi"):
    return FunctionalSpec("J", k, l, weight, mode)


def K(k, l, weight=ONE, mode="phi"):
    return FunctionalSpec("K", k, l, weight, mode)


def N(k, l, weight=ONE, mode="phi"):
    return FunctionalSpec("N", k, l, weight, mode)
