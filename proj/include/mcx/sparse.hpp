#ifndef MCX_SPARSE_HPP
#define MCX_SPARSE_HPP

#include <mcx/scalar.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace mcx {

using SparseVec = std::map<int, Scalar>; // index -> nonzero coefficient

struct CompositionNotZero : std::runtime_error {
    CompositionNotZero() : std::runtime_error("d_k * d_k1 has a nonzero entry (sign bug upstream)") {}
};

/*
 * Immutable sparse matrix over Q, row-major. Zero coefficients are never
 * stored. Elimination always works on a private copy, so values can be
 * shared freely between threads.
 */
class SparseMatrix {
public:
    SparseMatrix() : m_rows(0), m_cols(0) {}

    SparseMatrix(int rows, int cols,
                 const std::vector<std::tuple<int, int, Scalar>>& triplets = {})
        : m_rows(rows), m_cols(cols), m_data(rows) {
        for (const auto& [r, c, v] : triplets) {
            if (r < 0 || r >= rows || c < 0 || c >= cols)
                throw std::out_of_range("sparse matrix index out of bounds");
            Scalar& slot = m_data[r][c];
            slot += v;
            if (slot == 0) m_data[r].erase(c);
        }
    }

    int rows() const { return m_rows; }
    int cols() const { return m_cols; }

    const SparseVec& row(int r) const { return m_data[r]; }

    Scalar at(int r, int c) const {
        auto it = m_data[r].find(c);
        return it == m_data[r].end() ? Scalar(0) : it->second;
    }

    size_t nnz() const {
        size_t n = 0;
        for (const auto& r : m_data) n += r.size();
        return n;
    }

    bool is_zero() const { return nnz() == 0; }

    SparseMatrix transpose() const {
        std::vector<std::tuple<int, int, Scalar>> t;
        for (int r = 0; r < m_rows; ++r)
            for (const auto& [c, v] : m_data[r]) t.emplace_back(c, r, v);
        return SparseMatrix(m_cols, m_rows, t);
    }

    SparseMatrix multiply(const SparseMatrix& other) const {
        if (m_cols != other.m_rows)
            throw std::invalid_argument("matrix dimension mismatch in multiply");
        std::vector<std::tuple<int, int, Scalar>> t;
        for (int r = 0; r < m_rows; ++r)
            for (const auto& [k, v] : m_data[r])
                for (const auto& [c, w] : other.m_data[k]) t.emplace_back(r, c, v * w);
        return SparseMatrix(m_rows, other.m_cols, t);
    }

    SparseVec apply(const SparseVec& x) const {
        SparseVec y;
        for (int r = 0; r < m_rows; ++r) {
            Scalar acc = 0;
            const auto& rw = m_data[r];
            // iterate over the sparser of the two
            for (const auto& [c, v] : rw) {
                auto it = x.find(c);
                if (it != x.end()) acc += v * it->second;
            }
            if (acc != 0) y[r] = acc;
        }
        return y;
    }

private:
    int m_rows, m_cols;
    std::vector<SparseVec> m_data;
};

namespace detail {

/*
 * Gaussian elimination with Markowitz pivoting: at each step pick the
 * nonzero entry minimizing (row_nnz-1)*(col_nnz-1), ties broken by (row,col)
 * lexicographically so runs are reproducible. Pivot rows are frozen once
 * used (their leftover entries only reference later pivot columns and free
 * columns), so kernel/solve read-offs back-substitute in reverse pivot order.
 */
struct Elimination {
    int rows, cols;
    std::vector<SparseVec> work;          // mutated copy
    std::vector<std::pair<int, int>> pivots; // (row, col) in elimination order
    std::vector<char> row_used;
    std::vector<char> col_used;

    // blocked_col (if >= 0) is excluded from pivoting; used by solve() to
    // keep the augmented right-hand-side column out of the pivot set
    explicit Elimination(const SparseMatrix& m, int blocked_col = -1)
        : rows(m.rows()), cols(m.cols()), work(m.rows()),
          row_used(m.rows(), 0), col_used(m.cols(), 0) {
        if (blocked_col >= 0) col_used[blocked_col] = 1;
        for (int r = 0; r < rows; ++r) work[r] = m.row(r);
        run();
    }

    void run() {
        // active-entry counts, kept incrementally: scanning everything per
        // step is too slow on the bigger twisted-operad slices
        std::vector<long> row_nnz(rows, 0), col_nnz(cols, 0);
        std::vector<std::vector<int>> col_rows(cols); // superset of rows touching col
        for (int r = 0; r < rows; ++r) {
            row_nnz[r] = (long)work[r].size();
            for (const auto& [c, v] : work[r]) {
                ++col_nnz[c];
                col_rows[c].push_back(r);
            }
        }
        for (;;) {
            long best_cost = -1;
            int prow = -1, pcol = -1;
            for (int r = 0; r < rows; ++r) {
                if (row_used[r] || row_nnz[r] == 0) continue;
                for (const auto& [c, v] : work[r]) {
                    if (col_used[c]) continue;
                    long cost = (row_nnz[r] - 1) * (col_nnz[c] - 1);
                    if (best_cost < 0 || cost < best_cost ||
                        (cost == best_cost && std::pair(r, c) < std::pair(prow, pcol))) {
                        best_cost = cost;
                        prow = r;
                        pcol = c;
                    }
                    // entries are visited in (row, col) order, so the first
                    // zero-cost hit is already the lexicographic winner
                    if (best_cost == 0) break;
                }
                if (best_cost == 0) break;
            }
            if (prow < 0) break;

            // eliminate (prow, pcol), updating the counts as entries change
            Scalar piv = work[prow].at(pcol);
            for (auto& [c, v] : work[prow]) v /= piv;
            std::vector<int> targets;
            targets.swap(col_rows[pcol]);
            for (int r : targets) {
                if (r == prow || row_used[r]) continue;
                auto it = work[r].find(pcol);
                if (it == work[r].end()) continue;
                Scalar f = it->second;
                for (const auto& [c, v] : work[prow]) {
                    auto [slot, inserted] = work[r].try_emplace(c, 0);
                    slot->second -= f * v;
                    if (inserted) {
                        ++row_nnz[r];
                        ++col_nnz[c];
                        col_rows[c].push_back(r);
                    }
                    if (slot->second == 0) {
                        work[r].erase(slot);
                        --row_nnz[r];
                        --col_nnz[c];
                    }
                }
            }
            // entries of the pivot row leave the active submatrix
            for (const auto& [c, v] : work[prow]) --col_nnz[c];
            row_used[prow] = 1;
            col_used[pcol] = 1;
            pivots.emplace_back(prow, pcol);
        }
    }
};

} // namespace detail

inline int rank(const SparseMatrix& m) {
    detail::Elimination e(m);
    return (int)e.pivots.size();
}

// Q-basis of ker(m), one sparse column vector per free column.
inline std::vector<SparseVec> kernel_basis(const SparseMatrix& m) {
    detail::Elimination e(m);
    std::vector<int> pivot_row_of_col(m.cols(), -1);
    for (const auto& [r, c] : e.pivots) pivot_row_of_col[c] = r;
    std::vector<SparseVec> basis;
    for (int f = 0; f < m.cols(); ++f) {
        if (pivot_row_of_col[f] >= 0) continue;
        SparseVec v;
        v[f] = 1;
        for (auto it = e.pivots.rbegin(); it != e.pivots.rend(); ++it) {
            const auto& [pr, pc] = *it;
            Scalar acc = 0;
            for (const auto& [c, w] : e.work[pr]) {
                if (c == pc) continue;
                auto jt = v.find(c);
                if (jt != v.end()) acc += w * jt->second;
            }
            if (acc != 0) v[pc] = -acc;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

// One solution of m x = b, or nullopt if inconsistent.
inline std::optional<SparseVec> solve(const SparseMatrix& m, const SparseVec& b) {
    // eliminate on [m | b]; a pivot in the augmented column means inconsistent
    std::vector<std::tuple<int, int, Scalar>> t;
    for (int r = 0; r < m.rows(); ++r)
        for (const auto& [c, v] : m.row(r)) t.emplace_back(r, c, v);
    for (const auto& [r, v] : b) t.emplace_back(r, m.cols(), v);
    SparseMatrix aug(m.rows(), m.cols() + 1, t);
    int bc = m.cols();
    detail::Elimination ea(aug, bc);
    // after full elimination, an untouched row can only carry a right-hand
    // side residue; any such residue means the system is inconsistent
    for (int r = 0; r < m.rows(); ++r)
        if (!ea.row_used[r] && !ea.work[r].empty()) return std::nullopt;
    SparseVec x;
    for (auto it = ea.pivots.rbegin(); it != ea.pivots.rend(); ++it) {
        const auto& [pr, pc] = *it;
        Scalar acc = 0;
        for (const auto& [c, w] : ea.work[pr]) {
            if (c == pc) continue;
            if (c == bc) {
                acc -= w; // right-hand side, virtual value -1
                continue;
            }
            auto jt = x.find(c);
            if (jt != x.end()) acc += w * jt->second;
        }
        if (acc != 0) x[pc] = -acc;
    }
    return x;
}

struct ChainSliceHomology {
    long dim_chains = 0;
    long rank_d_in = 0;  // rank of the differential landing in this slice
    long rank_d_out = 0; // rank of the differential leaving this slice
    long betti = 0;
};

/*
 * d_k: slice -> lower degree, d_k1: upper degree -> slice.
 * Requires d_k . d_k1 = 0; betti = dim ker(d_k) - rank(d_k1).
 */
inline ChainSliceHomology homology_dims(const SparseMatrix& d_k, const SparseMatrix& d_k1) {
    if (d_k.cols() != d_k1.rows())
        throw std::invalid_argument("homology_dims: slice dimension mismatch");
    if (!d_k.multiply(d_k1).is_zero()) throw CompositionNotZero();
    ChainSliceHomology h;
    h.dim_chains = d_k.cols();
    h.rank_d_out = rank(d_k);
    h.rank_d_in = rank(d_k1);
    h.betti = h.dim_chains - h.rank_d_in - h.rank_d_out;
    return h;
}

} // namespace mcx

#endif
