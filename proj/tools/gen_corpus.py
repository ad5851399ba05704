#!/usr/bin/env python3
# Copyright 2026 The dsp-slp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the unrolled benchmark kernels under corpus/kernels."""

import argparse
import pathlib


class Kernel:
    def __init__(self, name, args=()):
        self.name = name
        self.args = list(args)
        self.lines = []
        self.carried = []

    def __call__(self, line):
        self.lines.append(line)

    def text(self):
        head = ", ".join(f"{t} %{n}" for t, n in self.args)
        body = "".join(f"  {l}\n" for l in self.lines)
        tail = "".join(f";; carried %{a} -> %{b} distance {d}\n"
                       for a, b, d in self.carried)
        return f"func @{self.name}({head}) {{\n{body}  ret\n}}\n{tail}"


def fig3():
    k = Kernel("fig3", [("i8", "b")])
    for i in range(2):
        k(f"%a{i} = load i8 @a[{i}]")
        k(f"%c{i} = mul i8 %a{i}, %b")
        k(f"store i8 %c{i}, @c[{i}]")
    return k


def vadd(name, n, ty):
    k = Kernel(name)
    for i in range(n):
        k(f"%x{i} = load {ty} @a[{i}]")
        k(f"%y{i} = load {ty} @b[{i}]")
        k(f"%s{i} = add {ty} %x{i}, %y{i}")
        k(f"store {ty} %s{i}, @c[{i}]")
    return k


def vadd_sext():
    # i8 inputs widened to i16: lanes read back through their exact range.
    k = Kernel("vadd_sext")
    for i in range(8):
        k(f"%x{i} = load i8 @a[{i}]")
        k(f"%y{i} = load u8 @b[{i}]")
        k(f"%xw{i} = sext i8 %x{i} to i16")
        k(f"%yw{i} = zext u8 %y{i} to i16")
        k(f"%s{i} = add i16 %xw{i}, %yw{i}")
        k(f"store i16 %s{i}, @c[{i}]")
    return k


def sub24():
    k = Kernel("sub24")
    for i in range(4):
        k(f"%x{i} = load i16 @a[{i}]")
        k(f"%y{i} = load i16 @b[{i}]")
        k(f"%xw{i} = sext i16 %x{i} to i32")
        k(f"%yw{i} = sext i16 %y{i} to i32")
        k(f"%d{i} = sub i32 %xw{i}, %yw{i}")
        k(f"store i32 %d{i}, @c[{i}]")
    for i in range(4, 6):
        k(f"%x{i} = load i24 @a[{i}]")
        k(f"%y{i} = load i24 @b[{i}]")
        k(f"%d{i} = sub i24 %x{i}, %y{i}")
        k(f"store i24 %d{i}, @d[{i}]")
    return k


def dot_tree(k, terms, acc, ty):
    """Left-leaning adder tree over `terms`; returns the root name."""
    cur = terms[0]
    for j, t in enumerate(terms[1:], 1):
        name = f"{acc}_{j}"
        k(f"%{name} = add {ty} %{cur}, %{t}")
        cur = name
    return cur


def mvm64():
    # y = A x with a 2x32 signed 8-bit matrix; both rows share x.
    k = Kernel("mvm64")
    for j in range(32):
        k(f"%x{j} = load i8 @x[{j}]")
        k(f"%xw{j} = sext i8 %x{j} to i32")
    for r in range(2):
        prods = []
        for j in range(32):
            k(f"%a{r}_{j} = load i8 @A{r}[{j}]")
            k(f"%aw{r}_{j} = sext i8 %a{r}_{j} to i32")
            k(f"%p{r}_{j} = mul i32 %aw{r}_{j}, %xw{j}")
            prods.append(f"p{r}_{j}")
        root = dot_tree(k, prods, f"s{r}", "i32")
        k(f"store i32 %{root}, @y[{r}]")
    return k


def mmm():
    # C = A B, 2x16 by 16x2, unsigned 8-bit operands.
    k = Kernel("mmm")
    for i in range(2):
        for kk in range(16):
            k(f"%a{i}_{kk} = load u8 @A{i}[{kk}]")
            k(f"%aw{i}_{kk} = zext u8 %a{i}_{kk} to i32")
    for j in range(2):
        for kk in range(16):
            k(f"%b{kk}_{j} = load u8 @B{j}[{kk}]")
            k(f"%bw{kk}_{j} = zext u8 %b{kk}_{j} to i32")
    for i in range(2):
        for j in range(2):
            prods = []
            for kk in range(16):
                k(f"%p{i}{j}_{kk} = mul i32 %aw{i}_{kk}, %bw{kk}_{j}")
                prods.append(f"p{i}{j}_{kk}")
            root = dot_tree(k, prods, f"s{i}{j}", "i32")
            k(f"store i32 %{root}, @C[{2 * i + j}]")
    return k


def mmm4b():
    # 4-bit unsigned activations times signed 4-bit weights; every weight
    # multiplies four activations.
    k = Kernel("mmm4b")
    for i in range(4):
        k(f"%a{i} = load u4 @a[{i}]")
        k(f"%aw{i} = zext u4 %a{i} to i8")
    for j in range(16):
        k(f"%w{j} = load i4 @w[{j}]")
        k(f"%ww{j} = sext i4 %w{j} to i8")
        for i in range(4):
            k(f"%p{j}_{i} = mul i8 %aw{i}, %ww{j}")
            k(f"store i8 %p{j}_{i}, @p[{4 * j + i}]")
    return k


def scal():
    k = Kernel("scal", [("i8", "alpha")])
    k("%al = sext i8 %alpha to i16")
    for i in range(8):
        k(f"%x{i} = load i8 @x[{i}]")
        k(f"%xw{i} = sext i8 %x{i} to i16")
        k(f"%y{i} = mul i16 %xw{i}, %al")
        k(f"store i16 %y{i}, @y[{i}]")
    return k


def axpy():
    k = Kernel("axpy", [("i8", "alpha")])
    k("%al = sext i8 %alpha to i16")
    for i in range(8):
        k(f"%x{i} = load i8 @x[{i}]")
        k(f"%xw{i} = sext i8 %x{i} to i16")
        k(f"%y{i} = load i16 @y[{i}]")
        k(f"%p{i} = mul i16 %xw{i}, %al")
        k(f"%r{i} = add i16 %p{i}, %y{i}")
        k(f"store i16 %r{i}, @y[{i}]")
    return k


def dot():
    # One tree only: nothing to pair it with.
    k = Kernel("dot")
    prods = []
    for i in range(8):
        k(f"%a{i} = load i8 @a[{i}]")
        k(f"%b{i} = load i8 @b[{i}]")
        k(f"%p{i} = mul i8 %a{i}, %b{i}")
        prods.append(f"p{i}")
    root = dot_tree(k, prods, "s", "i8")
    k(f"store i8 %{root}, @r[0]")
    return k


def mac2():
    # Two accumulators fed by products sharing the weight.
    k = Kernel("mac2", [("i8", "w")])
    for i in range(2):
        k(f"%x{i} = load i8 @x[{i}]")
        k(f"%acc{i} = load i16 @acc[{i}]")
    k("%ww = sext i8 %w to i16")
    for i in range(2):
        k(f"%xw{i} = sext i8 %x{i} to i16")
        k(f"%p{i} = mul i16 %xw{i}, %ww")
        k(f"%s{i} = add i16 %acc{i}, %p{i}")
        k(f"store i16 %s{i}, @acc[{i}]")
    k.carried = [(f"s{i}", f"acc{i}", 1) for i in range(2)]
    return k


def empty():
    return Kernel("empty")


KERNELS = {
    "fig3": fig3,
    "vadd": lambda: vadd("vadd", 32, "i12"),
    "vadd_odd": lambda: vadd("vadd_odd", 18, "i10"),
    "vadd_sext": vadd_sext,
    "sub24": sub24,
    "mvm64": mvm64,
    "mmm": mmm,
    "mmm4b": mmm4b,
    "scal": scal,
    "axpy": axpy,
    "dot": dot,
    "mac2": mac2,
    "empty": empty,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=pathlib.Path(__file__).resolve().parent.parent
                    / "corpus" / "kernels", type=pathlib.Path)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, make in KERNELS.items():
        (args.out / f"{name}.sir").write_text(make().text())


if __name__ == "__main__":
    main()
