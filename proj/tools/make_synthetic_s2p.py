#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# stripesim: waveform-level simulator for sub-THz radio stripes
# Copyright (C) 2026 The stripesim authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

"""Writes the synthetic Touchstone files under configs/data.

The responses are smooth stand-ins for measured fiber and coupler data: a sloped,
rippled magnitude with a small group delay. Re-run to regenerate the committed files.
"""
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "configs" / "data"


def write(name, comment, s21_of, f_lo=150e9, f_hi=166e9, points=401, refl_db=-25.0):
    lines = [f"! {comment}", "# GHz S RI R 50"]
    refl = 10 ** (refl_db / 20)
    for i in range(points):
        f = f_lo + (f_hi - f_lo) * i / (points - 1)
        s21 = s21_of(f)
        s11 = complex(refl, 0.0)
        vals = [s11, s21, s21, s11]
        cells = " ".join(f"{v.real:.12e} {v.imag:.12e}" for v in vals)
        lines.append(f"{f / 1e9:.9f} {cells}")
    (OUT / name).write_text("\n".join(lines) + "\n")


def fiber(f):
    fc = 157.75e9
    mag_db = -1.5 - 0.15 * (f - fc) / 1e9 + 0.2 * math.sin(2 * math.pi * (f - fc) / 3e9)
    tau = 0.5e-9
    return 10 ** (mag_db / 20) * complex(math.cos(-2 * math.pi * (f - fc) * tau), math.sin(-2 * math.pi * (f - fc) * tau))


def coupler(f):
    fc = 157.75e9
    mag_db = -0.8 + 0.05 * math.cos(2 * math.pi * (f - fc) / 5e9)
    return 10 ** (mag_db / 20) * complex(1.0, 0.0)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write("pmf_segment.s2p", "synthetic polymer fiber segment, through path", fiber)
    write("coupler.s2p", "synthetic RU coupler, through path", coupler)
