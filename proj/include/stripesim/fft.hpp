// SPDX-License-Identifier: Apache-2.0
//
// stripesim: waveform-level simulator for sub-THz radio stripes
// Copyright (C) 2026 The stripesim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "stripesim/grid.hpp"

#include <span>

// Thin FFTW wrapper. Plans are cached per (size, direction) and executed with the new-array
// interface, so the functions are safe to call from concurrent simulation runs.
namespace stripesim::fft {

/// In-place X[k] = sum_n x[n] exp(-j 2 pi k n / N). No normalization.
void forward(std::span<cd> data);

/// In-place x[n] = sum_k X[k] exp(+j 2 pi k n / N). No normalization.
void inverse(std::span<cd> data);

/// Centered (index N/2 = DC) to natural FFT order.
CVector ifftshift(std::span<const cd> centered);

/// Natural FFT order to centered.
CVector fftshift(std::span<const cd> natural);

} // namespace stripesim::fft
