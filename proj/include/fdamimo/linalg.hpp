// SPDX-License-Identifier: Apache-2.0
//
// fdamimo - FDA-MIMO radar multipath identification and mitigation toolkit
// Copyright (C) 2026 The fdamimo authors
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

#include "fdamimo/types.hpp"

namespace fdamimo
{
    struct HermitianMatrix
    {
        CMat values;
        double loading = 0.0; // diagonal loading already applied to values

        // Checks max |A - A^H| <= 1e-10 ||A||_F, then stores the exactly symmetrized matrix
        static HermitianMatrix from(const CMat &A, double loading = 0.0);

        Eigen::Index dim() const { return values.rows(); }
    };

    struct EigenDecomposition
    {
        RVec values;  // descending
        CMat vectors; // columns, first non-negligible component real and positive
    };

    EigenDecomposition eig_hermitian(const HermitianMatrix &A);

    // (A + eps I)^{-1} b through an LDL^T factorization, residual-checked
    CVec solve_loaded(const HermitianMatrix &A, const CVec &b, double epsilon);

    double trace_inverse_sum(const RVec &eigenvalues);

    // eps = 1e-3 tr(A) / dim
    double default_loading(const CMat &A);

    // 1/K sum_k x_k x_k^H over the columns of X
    CMat sample_covariance(const CMat &X);

    // A + eps I with the loading recorded
    HermitianMatrix load(const HermitianMatrix &A, double epsilon);
}
