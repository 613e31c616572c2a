#ifndef MCX_TESTS_DENSE_ORACLE_HPP
#define MCX_TESTS_DENSE_ORACLE_HPP

#include <mcx/sparse.hpp>
#include <vector>

// Plain dense Gaussian elimination, used only as an independent cross-check
// for the sparse Markowitz path. Deliberately naive.
inline int dense_rank(const mcx::SparseMatrix& m) {
    using mcx::Scalar;
    int R = m.rows(), C = m.cols();
    std::vector<std::vector<Scalar>> a(R, std::vector<Scalar>(C, Scalar(0)));
    for (int r = 0; r < R; ++r)
        for (const auto& [c, v] : m.row(r)) a[r][c] = v;
    int rank = 0;
    for (int col = 0; col < C && rank < R; ++col) {
        int piv = -1;
        for (int r = rank; r < R; ++r)
            if (a[r][col] != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(a[rank], a[piv]);
        for (int r = rank + 1; r < R; ++r) {
            if (a[r][col] == 0) continue;
            Scalar f = a[r][col] / a[rank][col];
            for (int c = col; c < C; ++c) a[r][c] -= f * a[rank][c];
        }
        ++rank;
    }
    return rank;
}

#endif
