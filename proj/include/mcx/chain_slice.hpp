#ifndef MCX_CHAIN_SLICE_HPP
#define MCX_CHAIN_SLICE_HPP

#include <mcx/operad_util.hpp>
#include <mcx/sparse.hpp>

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace mcx {

struct InfiniteSliceWithoutCap : std::runtime_error {
    explicit InfiniteSliceWithoutCap(const std::string& what) : std::runtime_error(what) {}
};

struct NotClosed : std::runtime_error {
    explicit NotClosed(const std::string& what) : std::runtime_error(what) {}
};

/*
 * One graded cell of a twisted complex: the canonical basis of the
 * (arity, degree, extra gradings) slice together with the differential
 * into the (degree-1)-slice. Printing stays stable across runs because
 * every enumerator sorts its basis.
 */
struct ChainSlice {
    std::string complex_id;
    int arity = 0;
    int degree = 0;
    std::vector<std::pair<std::string, int>> gradings;
    std::vector<std::string> basis;
    SparseMatrix differential_out; // rows: (degree-1)-slice, cols: this slice
};

struct HomologyRow {
    std::string complex_id;
    int arity = 0;
    int degree = 0;
    std::vector<std::pair<std::string, int>> gradings;
    int dim_chains = 0;
    int betti = 0;
    bool truncated = false;
};

// Matrix of d restricted to span(dom) -> span(cod); both bases must be
// duplicate-free and cod must absorb every output term.
template <class G, class Diff>
SparseMatrix slice_matrix(const std::vector<G>& dom, const std::vector<G>& cod, Diff d) {
    std::map<G, int> idx;
    for (size_t i = 0; i < cod.size(); ++i) idx.emplace(cod[i], (int)i);
    std::vector<std::tuple<int, int, Scalar>> trip;
    for (size_t j = 0; j < dom.size(); ++j) {
        for (const auto& [g, c] : d(dom[j])) {
            auto it = idx.find(g);
            if (it == idx.end())
                throw NotClosed("differential left the enumerated codomain basis");
            trip.emplace_back(it->second, (int)j, c);
        }
    }
    return SparseMatrix((int)cod.size(), (int)dom.size(), trip);
}

inline std::string homology_tsv(const std::vector<HomologyRow>& rows) {
    std::ostringstream os;
    os << "complex\tarity\tdegree\tgradings\tdim_chains\tbetti\ttruncated\n";
    for (const auto& r : rows) {
        os << r.complex_id << '\t' << r.arity << '\t' << r.degree << '\t';
        for (size_t i = 0; i < r.gradings.size(); ++i)
            os << (i ? "," : "") << r.gradings[i].first << '=' << r.gradings[i].second;
        if (r.gradings.empty()) os << '-';
        os << '\t' << r.dim_chains << '\t' << r.betti << '\t'
           << (r.truncated ? "yes" : "no") << '\n';
    }
    return os.str();
}

inline std::string homology_json(const std::vector<HomologyRow>& rows) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << (i ? ",\n " : "\n ") << "{\"complex\":\"" << r.complex_id
           << "\",\"arity\":" << r.arity << ",\"degree\":" << r.degree << ",\"gradings\":{";
        for (size_t j = 0; j < r.gradings.size(); ++j)
            os << (j ? "," : "") << '"' << r.gradings[j].first
               << "\":" << r.gradings[j].second;
        os << "},\"dim_chains\":" << r.dim_chains << ",\"betti\":" << r.betti
           << ",\"truncated\":" << (r.truncated ? "true" : "false") << "}";
    }
    os << "\n]\n";
    return os.str();
}

} // namespace mcx

#endif
