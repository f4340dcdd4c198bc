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

#include "fdamimo/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace fdamimo
{
    HermitianMatrix HermitianMatrix::from(const CMat &A, double loading)
    {
        if (A.rows() != A.cols())
            throw ConfigError("HermitianMatrix: matrix must be square");
        const double asym = (A - A.adjoint()).cwiseAbs().maxCoeff();
        const double fro = A.norm();
        if (asym > 1e-10 * std::max(fro, 1e-300))
            throw ConfigError("HermitianMatrix: input is not Hermitian (max |A - A^H| = " + std::to_string(asym) + ")");
        HermitianMatrix h;
        h.values = 0.5 * (A + A.adjoint());
        h.loading = loading;
        return h;
    }

    EigenDecomposition eig_hermitian(const HermitianMatrix &A)
    {
        const Eigen::Index n = A.dim();
        Eigen::SelfAdjointEigenSolver<CMat> es(A.values);
        if (es.info() != Eigen::Success)
        {
            throw NumericalError("eig_hermitian: no convergence");
        }

        // Eigen returns ascending order; reverse with a stable sort so ties keep solver order
        std::vector<Eigen::Index> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return es.eigenvalues()[a] > es.eigenvalues()[b]; });

        EigenDecomposition out;
        out.values.resize(n);
        out.vectors.resize(n, n);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            out.values[k] = es.eigenvalues()[idx[k]];
            CVec v = es.eigenvectors().col(idx[k]);
            // Phase convention: first component above 1e-8 becomes real positive
            for (Eigen::Index i = 0; i < n; ++i)
                if (std::abs(v[i]) > 1e-8)
                {
                    v *= std::conj(v[i]) / std::abs(v[i]);
                    break;
                }
            out.vectors.col(k) = v;
        }

        const double scale = std::max(A.values.norm(), 1e-300);
        const double resid = (A.values * out.vectors - out.vectors * out.values.asDiagonal()).norm() / scale;
        if (!(resid < 1e-8))
            throw NumericalError("eig_hermitian: residual norm " + std::to_string(resid));
        return out;
    }

    CVec solve_loaded(const HermitianMatrix &A, const CVec &b, double epsilon)
    {
        if (epsilon < 0.0)
            throw ConfigError("solve_loaded: epsilon must be >= 0");
        if (b.size() != A.dim())
            throw ConfigError("solve_loaded: dimension mismatch");
        CMat B = A.values;
        B.diagonal().array() += epsilon;
        Eigen::LDLT<CMat> ldlt(B);
        if (ldlt.info() != Eigen::Success)
            throw NumericalError("solve_loaded: factorization failed");
        CVec x = ldlt.solve(b);
        const double bn = b.norm();
        const double r = (B * x - b).norm();
        if (!std::isfinite(r) || r > 1e-8 * std::max(bn, 1e-300))
        {
            // LDLT without pivot growth control can lose accuracy; retry with a full-pivot LU
            x = B.fullPivLu().solve(b);
            const double r2 = (B * x - b).norm();
            if (!std::isfinite(r2) || r2 > 1e-8 * std::max(bn, 1e-300))
                throw NumericalError("solve_loaded: singular system (residual " + std::to_string(r2) + ")");
        }
        return x;
    }

    double trace_inverse_sum(const RVec &eigenvalues)
    {
        double s = 0.0;
        for (double v : eigenvalues)
        {
            if (!(v > 0.0))
                throw NumericalError("trace_inverse_sum: nonpositive eigenvalue");
            s += 1.0 / v;
        }
        return s;
    }

    double default_loading(const CMat &A)
    {
        return 1e-3 * A.trace().real() / static_cast<double>(A.rows());
    }

    CMat sample_covariance(const CMat &X)
    {
        if (X.cols() == 0)
            throw ConfigError("sample_covariance: no snapshots");
        CMat R = CMat::Zero(X.rows(), X.rows());
        R.selfadjointView<Eigen::Lower>().rankUpdate(X, 1.0 / static_cast<double>(X.cols()));
        return R.selfadjointView<Eigen::Lower>();
    }

    HermitianMatrix load(const HermitianMatrix &A, double epsilon)
    {
        HermitianMatrix h = A;
        h.values.diagonal().array() += epsilon;
        h.loading += epsilon;
        return h;
    }
}
