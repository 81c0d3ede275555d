// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <voxgauss/kernels.hpp>

namespace voxgauss::kernels::detail {

/// Defined in the AVX2 translation unit. Does not check CPU support.
const KernelTable& avx2_table_unchecked();

} // namespace voxgauss::kernels::detail
