#ifndef MCX_GRADED_MODULE_HPP
#define MCX_GRADED_MODULE_HPP

#include <mcx/sparse.hpp>

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcx {

/*
 * Finite graded module with an integer filtration weight per generator.
 * Carries the two truncation caps used by every multilinear-map operation:
 * components of weight > truncation_weight are dropped, and structure maps
 * of arity > arity_cap are identically zero by convention.
 */
struct GradedModuleSpec {
    std::vector<std::string> names;
    std::map<std::string, int> index;
    std::vector<int> degree;
    std::vector<int> weight;
    int truncation_weight = 0;
    int arity_cap = 2;

    int add_basis(const std::string& name, int deg, int wt) {
        if (index.count(name)) throw std::invalid_argument("duplicate generator " + name);
        index[name] = (int)names.size();
        names.push_back(name);
        degree.push_back(deg);
        weight.push_back(wt);
        return (int)names.size() - 1;
    }

    size_t dim() const { return names.size(); }
};

using ModulePtr = std::shared_ptr<const GradedModuleSpec>;

inline void validate_module(const ModulePtr& m) {
    for (size_t i = 0; i < m->dim(); ++i)
        if (m->weight[i] < 0)
            throw std::invalid_argument("negative filtration weight on " + m->names[i]);
    if (m->arity_cap < 2) throw std::invalid_argument("arity cap must be at least 2");
}

struct WeightZeroTwist : std::runtime_error {
    WeightZeroTwist() : std::runtime_error("twisting element has a weight-0 component") {}
};
struct CurvatureNotUnital : std::runtime_error {
    CurvatureNotUnital()
        : std::runtime_error("the supplied functional does not send the curvature to 1") {}
};
struct SourceTargetMismatch : std::runtime_error {
    SourceTargetMismatch()
        : std::runtime_error("target of the inner morphism differs from source of the outer one") {}
};

// Sparse multilinear map: basis input tuple -> output linear combination.
// An arity-0 map is stored under the empty tuple.
using KeyTuple = std::vector<int>;
using MultiMap = std::map<KeyTuple, SparseVec>;

inline int tuple_degree(const GradedModuleSpec& m, const KeyTuple& t) {
    int s = 0;
    for (int i : t) s += m.degree[i];
    return s;
}

inline int tuple_weight(const GradedModuleSpec& m, const KeyTuple& t) {
    int s = 0;
    for (int i : t) s += m.weight[i];
    return s;
}

inline void weight_truncate(const GradedModuleSpec& m, SparseVec& v) {
    for (auto it = v.begin(); it != v.end();)
        it = (m.weight[it->first] > m.truncation_weight) ? v.erase(it) : std::next(it);
}

inline Scalar factorial(int n) {
    Scalar r(1);
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

inline void add_scaled(SparseVec& acc, const SparseVec& v, const Scalar& c) {
    if (c == 0) return;
    for (const auto& [i, x] : v) {
        Scalar& slot = acc[i];
        slot += c * x;
        if (slot == 0) acc.erase(i);
    }
}

/*
 * Koszul sign of sorting a tuple by basis index with stable transpositions;
 * nullopt when the sorted value is forced to vanish (two equal entries of
 * odd degree). Used by the symmetric-map storage.
 */
inline std::optional<int> sort_sign(const GradedModuleSpec& m, KeyTuple& t) {
    int sign = 1;
    for (size_t i = 1; i < t.size(); ++i)
        for (size_t j = i; j > 0 && t[j] < t[j - 1]; --j) {
            if ((m.degree[t[j]] & 1) && (m.degree[t[j - 1]] & 1)) sign = -sign;
            std::swap(t[j], t[j - 1]);
        }
    for (size_t i = 1; i < t.size(); ++i)
        if (t[i] == t[i - 1] && (m.degree[t[i]] & 1)) return std::nullopt;
    return sign;
}

// Koszul sign of pulling the selected entries of a tuple to the front,
// preserving the internal order of both groups.
inline int front_sign(const GradedModuleSpec& m, const KeyTuple& t,
                      const std::vector<char>& selected) {
    int sign = 1;
    int unselected_odd = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (selected[i]) {
            if ((m.degree[t[i]] & 1) && (unselected_odd & 1)) sign = -sign;
        } else if (m.degree[t[i]] & 1) {
            ++unselected_odd;
        }
    }
    return sign;
}

// Evaluate a symmetric map (stored on sorted tuples) on an arbitrary tuple.
inline SparseVec eval_sym(const GradedModuleSpec& m, const MultiMap& f, const KeyTuple& t) {
    KeyTuple s = t;
    auto sg = sort_sign(m, s);
    if (!sg) return {};
    auto it = f.find(s);
    if (it == f.end()) return {};
    SparseVec out;
    add_scaled(out, it->second, Scalar(*sg));
    return out;
}

// Enumerate all basis tuples of the given arity whose total weight stays
// within the truncation window, in lexicographic order.
template <class Body>
inline void for_each_tuple(const GradedModuleSpec& m, int arity, Body&& body) {
    KeyTuple t;
    auto rec = [&](auto&& self, int left, int wt) -> void {
        if (left == 0) {
            body((const KeyTuple&)t);
            return;
        }
        for (int i = 0; i < (int)m.dim(); ++i) {
            if (wt + m.weight[i] > m.truncation_weight) continue;
            t.push_back(i);
            self(self, left - 1, wt + m.weight[i]);
            t.pop_back();
        }
    };
    rec(rec, arity, 0);
}

// Sorted (weakly increasing) variant for symmetric maps.
template <class Body>
inline void for_each_sorted_tuple(const GradedModuleSpec& m, int arity, Body&& body) {
    KeyTuple t;
    auto rec = [&](auto&& self, int left, int wt, int min_idx) -> void {
        if (left == 0) {
            body((const KeyTuple&)t);
            return;
        }
        for (int i = min_idx; i < (int)m.dim(); ++i) {
            if (wt + m.weight[i] > m.truncation_weight) continue;
            t.push_back(i);
            self(self, left - 1, wt + m.weight[i], i);
            t.pop_back();
        }
    };
    rec(rec, arity, 0, 0);
}

struct RelationReport {
    bool pass = true;
    std::map<int, long> residual_entries; // relation arity -> nonzero residual entries
    int worst_arity = -1;
    long worst_count = 0;

    void record(int arity, long count) {
        residual_entries[arity] += count;
        if (count > 0) pass = false;
        if (residual_entries[arity] > worst_count) {
            worst_count = residual_entries[arity];
            worst_arity = arity;
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json per;
        for (const auto& [n, c] : residual_entries) per[std::to_string(n)] = c;
        return {{"pass", pass},
                {"residual_entries", per},
                {"worst_arity", worst_arity}};
    }
};

inline ModulePtr module_from_json(const nlohmann::json& j, int truncation_weight,
                                  int arity_cap) {
    auto m = std::make_shared<GradedModuleSpec>();
    m->truncation_weight = truncation_weight;
    m->arity_cap = arity_cap;
    for (const auto& b : j.at("basis"))
        m->add_basis(b.at("name").get<std::string>(), b.at("degree").get<int>(),
                     b.at("weight").get<int>());
    validate_module(m);
    return m;
}

inline nlohmann::json module_to_json(const GradedModuleSpec& m) {
    nlohmann::json basis = nlohmann::json::array();
    for (size_t i = 0; i < m.dim(); ++i)
        basis.push_back({{"name", m.names[i]},
                         {"degree", m.degree[i]},
                         {"weight", m.weight[i]}});
    return {{"basis", basis}};
}

inline SparseVec module_lincomb_from_json(const nlohmann::json& j, const GradedModuleSpec& m) {
    SparseVec v;
    for (const auto& term : j) {
        int i = m.index.at(term.at("gen").get<std::string>());
        Scalar c = scalar_from_string(term.at("coeff").get<std::string>());
        Scalar& slot = v[i];
        slot += c;
        if (slot == 0) v.erase(i);
    }
    return v;
}

inline nlohmann::json module_lincomb_to_json(const SparseVec& v, const GradedModuleSpec& m) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [i, c] : v)
        out.push_back({{"gen", m.names[i]}, {"coeff", scalar_to_string(c)}});
    return out;
}

} // namespace mcx

#endif
