"""Seeded generator of small, terminating, well-typed MOL programs.

Generated programs never dereference null (every reference local is bound to
a fresh object when declared), never divide by a variable, call methods
only along a fixed rank order (so the call graph is acyclic) and bound every
loop by a dedicated counter.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field


@dataclass
class _Method:
    name: str
    rank: int
    params: list[str]
    returns: bool


@dataclass
class _Class:
    name: str
    parent: "_Class | None"
    fields: list[str] = field(default_factory=list)
    methods: dict = field(default_factory=dict)  # name -> _Method declared here

    def all_fields(self) -> list[str]:
        own = list(self.fields)
        return (self.parent.all_fields() if self.parent else []) + own

    def lookup(self, name: str):
        c = self
        while c is not None:
            if name in c.methods:
                return c.methods[name]
            c = c.parent
        return None

    def all_methods(self) -> list[_Method]:
        seen, out, c = set(), [], self
        while c is not None:
            for m in c.methods.values():
                if m.name not in seen:
                    seen.add(m.name)
                    out.append(m)
            c = c.parent
        return out


class _Gen:
    def __init__(self, seed: int, size: int):
        self.rng = random.Random(seed)
        self.size = size
        self.lines: list[str] = []
        self.counter = 0
        self.inputs = [f"in{i}" for i in range(self.rng.randint(1, 3))]

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    # -- expressions ---------------------------------------------------------

    def int_atom(self, env: list[str], cls: "_Class | None") -> str:
        r = self.rng.random()
        if env and r < 0.45:
            return self.rng.choice(env)
        if cls is not None and cls.all_fields() and r < 0.7:
            return f"this.{self.rng.choice(cls.all_fields())}"
        return str(self.rng.randint(0, 9))

    def int_expr(self, env: list[str], cls, depth: int = 0) -> str:
        if depth >= 2 or self.rng.random() < 0.4:
            return self.int_atom(env, cls)
        op = self.rng.choice(["+", "-", "*", "+", "-", "/", "%"])
        left = self.int_expr(env, cls, depth + 1)
        if op in ("/", "%"):
            return f"({left} {op} {self.rng.randint(1, 5)})"
        return f"({left} {op} {self.int_expr(env, cls, depth + 1)})"

    def cond(self, env: list[str], cls) -> str:
        op = self.rng.choice(["<", "<=", ">", ">=", "==", "!="])
        c = f"{self.int_expr(env, cls, 1)} {op} {self.int_expr(env, cls, 1)}"
        r = self.rng.random()
        if r < 0.1:
            return f"!({c})"
        if r < 0.2:
            return f"{c} && {self.int_atom(env, cls)} > 0"
        return c

    # -- statements ----------------------------------------------------------

    def block(self, env: list[str], cls, method: "_Method | None", depth: int, budget: int, pad: str) -> list[str]:
        out: list[str] = []
        env = list(env)
        for _ in range(budget):
            r = self.rng.random()
            if r < 0.25 or not env:
                v = self.fresh("v")
                out.append(f"{pad}var int {v} = {self.int_expr(env, cls)};")
                env.append(v)
            elif r < 0.4:
                out.append(f"{pad}{self.rng.choice(env)} = {self.int_expr(env, cls)};")
            elif r < 0.5 and cls is not None and cls.all_fields():
                out.append(f"{pad}this.{self.rng.choice(cls.all_fields())} = {self.int_expr(env, cls)};")
            elif r < 0.62 and depth < 2:
                out.append(f"{pad}if ({self.cond(env, cls)}) {{")
                out += self.block(env, cls, method, depth + 1, self.rng.randint(1, 3), pad + "  ")
                if self.rng.random() < 0.5:
                    out.append(f"{pad}}} else {{")
                    out += self.block(env, cls, method, depth + 1, self.rng.randint(1, 3), pad + "  ")
                out.append(f"{pad}}}")
            elif r < 0.7 and depth < 2:
                i = self.fresh("i")
                out.append(f"{pad}var int {i} = 0;")
                out.append(f"{pad}while ({i} < {self.rng.randint(1, 3)}) {{")
                out += self.block(env, cls, method, depth + 1, self.rng.randint(1, 3), pad + "  ")
                out.append(f"{pad}  {i} = {i} + 1;")
                out.append(f"{pad}}}")
            elif r < 0.85 and cls is not None and method is not None:
                callees = [m for m in cls.all_methods() if m.rank < method.rank]
                if callees:
                    callee = self.rng.choice(callees)
                    args = ", ".join(self.int_expr(env, cls, 1) for _ in callee.params)
                    if callee.returns and self.rng.random() < 0.8:
                        v = self.fresh("r")
                        out.append(f"{pad}var int {v} = this.{callee.name}({args});")
                        env.append(v)
                    else:
                        out.append(f"{pad}this.{callee.name}({args});")
            elif r < 0.92:
                out.append(f"{pad}print({self.int_expr(env, cls, 1)});")
            elif method is not None and method.returns and depth > 0:
                out.append(f"{pad}return {self.int_expr(env, cls, 1)};")
        return out

    # -- program ---------------------------------------------------------------

    def program(self) -> str:
        rng = self.rng
        classes: list[_Class] = []
        for i in range(rng.randint(1, 3)):
            base = _Class(f"C{i}", None, [f"f{i}_{j}" for j in range(rng.randint(1, 3))])
            classes.append(base)
            for j in range(rng.randint(0, 2)):
                sub = _Class(f"C{i}S{j}", base, [f"g{i}_{j}"] if rng.random() < 0.5 else [])
                classes.append(sub)
        rank = 0
        for c in classes:
            if c.parent is None:
                for _ in range(rng.randint(1, 3)):
                    rank += 1
                    params = [f"p{k}" for k in range(rng.randint(0, 2))]
                    m = _Method(f"m{rank}", rank, params, rng.random() < 0.6)
                    c.methods[m.name] = m
        for c in classes:
            if c.parent is not None:
                for m in c.parent.all_methods():
                    if rng.random() < 0.5:
                        c.methods[m.name] = _Method(m.name, m.rank, m.params, m.returns)
        lines = []
        for c in classes:
            ext = f" extends {c.parent.name}" if c.parent else ""
            lines.append(f"class {c.name}{ext} {{")
            for f in c.fields:
                lines.append(f"  field int {f};")
            for m in c.methods.values():
                ret = "int" if m.returns else "void"
                params = ", ".join(f"int {p}" for p in m.params)
                lines.append(f"  method {ret} {m.name}({params}) {{")
                lines += self.block(m.params, c, m, 0, rng.randint(1, self.size), "    ")
                if m.returns:
                    lines.append(f"    return {self.int_expr(m.params, c, 1)};")
                lines.append("  }")
            lines.append("}")
            lines.append("")
        lines.append("main {")
        env = []
        for k in self.inputs:
            lines.append(f'  var int {k} = input("{k}");')
            env.append(k)
        objects = []
        for _ in range(rng.randint(1, 3)):
            base = rng.choice([c for c in classes if c.parent is None])
            family = [c for c in classes if c is base or c.parent is base]
            o = self.fresh("o")
            if len(family) > 1 and rng.random() < 0.5:
                a, b = rng.sample(family, 2)
                lines.append(f"  var {base.name} {o} = new {a.name};")
                lines.append(f"  if ({rng.choice(env)} > 0) {{")
                lines.append(f"    {o} = new {b.name};")
                lines.append("  }")
            else:
                lines.append(f"  var {base.name} {o} = new {rng.choice(family).name};")
            objects.append((o, base))
        for _ in range(rng.randint(2, self.size)):
            o, base = rng.choice(objects)
            r = rng.random()
            if r < 0.5:
                m = rng.choice(base.all_methods())
                args = ", ".join(self.int_expr(env, None, 1) for _ in m.params)
                if m.returns:
                    v = self.fresh("x")
                    lines.append(f"  var int {v} = {o}.{m.name}({args});")
                    env.append(v)
                else:
                    lines.append(f"  {o}.{m.name}({args});")
            elif r < 0.7:
                f = rng.choice(base.all_fields())
                lines.append(f"  {o}.{f} = {self.int_expr(env, None, 1)};")
            elif r < 0.85:
                f = rng.choice(base.all_fields())
                v = self.fresh("x")
                lines.append(f"  var int {v} = {o}.{f};")
                env.append(v)
            else:
                lines.append(f"  print({self.int_expr(env, None, 1)});")
        o, base = rng.choice(objects)
        lines.append(f"  print({o}.{rng.choice(base.all_fields())});")
        lines.append("}")
        return "\n".join(lines) + "\n"


def random_program(seed: int, size: int = 5) -> str:
    """Source text of a random program; ``size`` bounds statements per block."""
    return _Gen(seed, size).program()
