#ifndef MCX_ALGEBRA_HPP
#define MCX_ALGEBRA_HPP

#include <mcx/sparse.hpp>

#include <json.hpp>

#include <algorithm>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcx {

enum class AlgKind { DgLie, PreLie };

/*
 * Finite-basis filtered dg algebra (dg Lie bracket or left-unital pre-Lie
 * product) with integer homological degrees and filtration weights. All the
 * convergence in this engine is weight truncation: components landing above
 * truncation_weight are dropped on the spot.
 *
 * Immutable after validate(); shared via shared_ptr from AlgebraElement.
 */
struct FilteredAlgebraSpec {
    std::vector<std::string> names;
    std::map<std::string, int> index;
    std::vector<int> degree;
    std::vector<int> weight;
    AlgKind kind = AlgKind::PreLie;
    int unit = -1; // basis index, or -1
    int truncation_weight = 0;
    std::map<std::pair<int, int>, SparseVec> product; // (i,j) -> x_i * x_j
    std::map<int, SparseVec> differential;

    int add_basis(const std::string& name, int deg, int wt) {
        if (index.count(name)) throw std::invalid_argument("duplicate basis name " + name);
        index[name] = (int)names.size();
        names.push_back(name);
        degree.push_back(deg);
        weight.push_back(wt);
        return (int)names.size() - 1;
    }

    void set_product(int i, int j, SparseVec v) {
        if (!v.empty()) product[{i, j}] = std::move(v);
    }

    void set_differential(int i, SparseVec v) {
        if (!v.empty()) differential[i] = std::move(v);
    }

    size_t dim() const { return names.size(); }
};

using AlgebraPtr = std::shared_ptr<const FilteredAlgebraSpec>;

struct NoUnit : std::runtime_error {
    NoUnit() : std::runtime_error("algebra has no unit") {}
};
struct NotGroupLike : std::runtime_error {
    NotGroupLike() : std::runtime_error("element is not of the form 1 + (weight >= 1)") {}
};
struct WeightZeroGaugeInput : std::runtime_error {
    WeightZeroGaugeInput() : std::runtime_error("gauge parameter has a weight-0 component") {}
};
struct FormulaMismatch : std::runtime_error {
    FormulaMismatch() : std::runtime_error("circle-product and flow gauge formulas disagree") {}
};
struct NotMaurerCartan : std::runtime_error {
    NotMaurerCartan() : std::runtime_error("element does not satisfy the Maurer-Cartan equation") {}
};
struct NotACycle : std::runtime_error {
    NotACycle() : std::runtime_error("first-order term is not a twisted cycle") {}
};
struct InvalidDeformation : std::runtime_error {
    InvalidDeformation() : std::runtime_error("input series is not a formal deformation") {}
};

class AlgebraElement {
public:
    AlgebraElement() = default;
    AlgebraElement(AlgebraPtr alg, SparseVec coeffs = {})
        : m_alg(std::move(alg)), m_coeffs(std::move(coeffs)) {
        truncate();
    }

    const AlgebraPtr& alg() const { return m_alg; }
    const SparseVec& coeffs() const { return m_coeffs; }
    bool is_zero() const { return m_coeffs.empty(); }

    Scalar coeff(int i) const {
        auto it = m_coeffs.find(i);
        return it == m_coeffs.end() ? Scalar(0) : it->second;
    }

    bool is_homogeneous(int d) const {
        for (const auto& [i, c] : m_coeffs)
            if (m_alg->degree[i] != d) return false;
        return true;
    }

    int min_weight() const { // weight of the lowest filtration layer present
        int w = -1;
        for (const auto& [i, c] : m_coeffs) {
            int wi = m_alg->weight[i];
            if (w < 0 || wi < w) w = wi;
        }
        return w;
    }

    AlgebraElement& operator+=(const AlgebraElement& o) {
        for (const auto& [i, c] : o.m_coeffs) {
            Scalar& slot = m_coeffs[i];
            slot += c;
            if (slot == 0) m_coeffs.erase(i);
        }
        return *this;
    }

    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) {
        a += b;
        return a;
    }

    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) {
        return a + (b * Scalar(-1));
    }

    friend AlgebraElement operator*(const AlgebraElement& a, const Scalar& s) {
        AlgebraElement r = a;
        if (s == 0) {
            r.m_coeffs.clear();
            return r;
        }
        for (auto& [i, c] : r.m_coeffs) c *= s;
        return r;
    }

    friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
        return a.m_coeffs == b.m_coeffs;
    }

    // the structure product (pre-Lie star, or the bracket for dg Lie specs)
    friend AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) {
        AlgebraElement r(a.m_alg);
        const auto& spec = *a.m_alg;
        for (const auto& [i, ci] : a.m_coeffs)
            for (const auto& [j, cj] : b.m_coeffs) {
                auto it = spec.product.find({i, j});
                if (it == spec.product.end()) continue;
                for (const auto& [k, ck] : it->second) r.add(k, ci * cj * ck);
            }
        r.truncate();
        return r;
    }

    friend AlgebraElement d(const AlgebraElement& a) {
        AlgebraElement r(a.m_alg);
        for (const auto& [i, ci] : a.m_coeffs) {
            auto it = a.m_alg->differential.find(i);
            if (it == a.m_alg->differential.end()) continue;
            for (const auto& [k, ck] : it->second) r.add(k, ci * ck);
        }
        r.truncate();
        return r;
    }

    // graded commutator [a,b] = a*b - (-1)^{|a||b|} b*a (pre-Lie kind);
    // for dg Lie specs the stored product already is the bracket
    friend AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
        if (a.m_alg->kind == AlgKind::DgLie) return mul(a, b);
        AlgebraElement r(a.m_alg);
        // split into homogeneous pieces for the Koszul sign
        for (const auto& [da, pa] : a.by_degree())
            for (const auto& [db, pb] : b.by_degree()) {
                r += mul(pa, pb);
                Scalar s = (da * db) % 2 ? Scalar(1) : Scalar(-1);
                r += mul(pb, pa) * s;
            }
        return r;
    }

    std::map<int, AlgebraElement> by_degree() const {
        std::map<int, AlgebraElement> parts;
        for (const auto& [i, c] : m_coeffs) {
            int dg = m_alg->degree[i];
            auto it = parts.find(dg);
            if (it == parts.end()) it = parts.emplace(dg, AlgebraElement(m_alg)).first;
            it->second.add(i, c);
        }
        return parts;
    }

    void add(int i, const Scalar& c) {
        if (c == 0) return;
        Scalar& slot = m_coeffs[i];
        slot += c;
        if (slot == 0) m_coeffs.erase(i);
    }

private:
    void truncate() {
        if (!m_alg) return;
        for (auto it = m_coeffs.begin(); it != m_coeffs.end();) {
            if (m_alg->weight[it->first] > m_alg->truncation_weight || it->second == 0)
                it = m_coeffs.erase(it);
            else
                ++it;
        }
    }

    AlgebraPtr m_alg;
    SparseVec m_coeffs;
};

inline AlgebraElement basis_element(const AlgebraPtr& alg, int i) {
    return AlgebraElement(alg, {{i, Scalar(1)}});
}

inline AlgebraElement unit_element(const AlgebraPtr& alg) {
    if (alg->unit < 0) throw NoUnit();
    return basis_element(alg, alg->unit);
}

/*
 * Structural validation: degree/weight compatibility of product and
 * differential, d^2 = 0, Leibniz, and the kind-specific identity (graded
 * Jacobi, or right-symmetry of the associator), all modulo weight > W.
 */
inline void validate_algebra(const AlgebraPtr& alg) {
    const auto& A = *alg;
    auto fail = [](const std::string& m) { throw std::invalid_argument("algebra invalid: " + m); };
    for (size_t i = 0; i < A.dim(); ++i)
        if (A.weight[i] < 0) fail("negative weight at " + A.names[i]);
    if (A.unit >= 0) {
        if (A.degree[A.unit] != 0 || A.weight[A.unit] != 0) fail("unit must have degree 0, weight 0");
        if (A.differential.count(A.unit)) fail("d(1) != 0");
        for (size_t j = 0; j < A.dim(); ++j) {
            AlgebraElement p = mul(basis_element(alg, A.unit), basis_element(alg, (int)j));
            if (!(p == basis_element(alg, (int)j))) fail("1*x != x at " + A.names[j]);
        }
    }
    for (const auto& [ij, v] : A.product) {
        auto [i, j] = ij;
        for (const auto& [k, c] : v) {
            if (A.degree[k] != A.degree[i] + A.degree[j]) fail("product not degree-additive");
            if (A.weight[k] < A.weight[i] + A.weight[j]) fail("product drops filtration weight");
        }
    }
    for (const auto& [i, v] : A.differential)
        for (const auto& [k, c] : v) {
            if (A.degree[k] != A.degree[i] - 1) fail("differential is not degree -1");
            if (A.weight[k] < A.weight[i]) fail("differential decreases weight");
        }
    auto el = [&](int i) { return basis_element(alg, i); };
    for (size_t i = 0; i < A.dim(); ++i)
        if (!d(d(el((int)i))).is_zero()) fail("d^2 != 0 at " + A.names[i]);
    // Leibniz for the stored product
    for (const auto& [ij, v] : A.product) {
        auto [i, j] = ij;
        Scalar sg = A.degree[i] % 2 ? Scalar(-1) : Scalar(1);
        AlgebraElement lhs = d(mul(el(i), el(j)));
        AlgebraElement rhs = mul(d(el(i)), el(j)) + mul(el(i), d(el(j))) * sg;
        if (!(lhs == rhs)) fail("Leibniz fails at (" + A.names[i] + "," + A.names[j] + ")");
    }
    size_t n = A.dim();
    // only weight-admissible triples can produce anything below the cutoff,
    // so enumerate those instead of sweeping n^3 combinations
    std::vector<std::vector<int>> by_weight((size_t)A.truncation_weight + 1);
    for (size_t i = 0; i < n; ++i)
        if (A.weight[i] <= A.truncation_weight) by_weight[(size_t)A.weight[i]].push_back((int)i);
    auto admissible_triples = [&](auto&& body) {
        int W = A.truncation_weight;
        for (int wi = 0; wi <= W; ++wi)
            for (int wj = 0; wi + wj <= W; ++wj)
                for (int wk = 0; wi + wj + wk <= W; ++wk)
                    for (int i : by_weight[(size_t)wi])
                        for (int j : by_weight[(size_t)wj])
                            for (int k : by_weight[(size_t)wk]) body(i, j, k);
    };
    if (A.kind == AlgKind::DgLie) {
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i; j < n; ++j) {
                if (A.weight[i] + A.weight[j] > A.truncation_weight) continue;
                Scalar sg = (A.degree[i] * A.degree[j]) % 2 ? Scalar(1) : Scalar(-1);
                if (!(mul(el((int)i), el((int)j)) + mul(el((int)j), el((int)i)) * (-sg)).is_zero())
                    fail("bracket not graded-skew at (" + A.names[i] + "," + A.names[j] + ")");
            }
        admissible_triples([&](int i, int j, int k) {
            auto sg = [&](int p, int q) {
                return (A.degree[(size_t)p] * A.degree[(size_t)q]) % 2 ? Scalar(-1) : Scalar(1);
            };
            AlgebraElement jac = mul(mul(el(i), el(j)), el(k)) * sg(i, k) +
                                 mul(mul(el(j), el(k)), el(i)) * sg(j, i) +
                                 mul(mul(el(k), el(i)), el(j)) * sg(k, j);
            if (!jac.is_zero()) fail("Jacobi fails");
        });
    } else {
        admissible_triples([&](int i, int j, int k) {
            auto assoc = [&](int x, int y, int z) {
                return mul(mul(el(x), el(y)), el(z)) - mul(el(x), mul(el(y), el(z)));
            };
            Scalar sg = (A.degree[(size_t)j] * A.degree[(size_t)k]) % 2 ? Scalar(-1) : Scalar(1);
            if (!(assoc(i, j, k) - assoc(i, k, j) * sg).is_zero())
                fail("associator not right-symmetric");
        });
    }
}

// ---- JSON ingestion (shared format with the homotopy-algebra module) ----

inline SparseVec lincomb_from_json(const nlohmann::json& j,
                                   const std::map<std::string, int>& index) {
    SparseVec v;
    for (const auto& term : j) {
        int i = index.at(term.at("gen").get<std::string>());
        Scalar c = scalar_from_string(term.at("coeff").get<std::string>());
        if (c != 0) v[i] += c;
    }
    for (auto it = v.begin(); it != v.end();)
        it = it->second == 0 ? v.erase(it) : std::next(it);
    return v;
}

inline AlgebraPtr algebra_from_json(const nlohmann::json& j, int truncation_weight) {
    auto spec = std::make_shared<FilteredAlgebraSpec>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "dg-lie")
        spec->kind = AlgKind::DgLie;
    else if (kind == "left-unital-pre-lie")
        spec->kind = AlgKind::PreLie;
    else
        throw std::invalid_argument("unknown algebra kind: " + kind);
    spec->truncation_weight = truncation_weight;
    for (const auto& b : j.at("basis"))
        spec->add_basis(b.at("name").get<std::string>(), b.at("degree").get<int>(),
                        b.at("weight").get<int>());
    if (j.contains("unit") && !j.at("unit").is_null())
        spec->unit = spec->index.at(j.at("unit").get<std::string>());
    for (const auto& p : j.value("product", nlohmann::json::array())) {
        int l = spec->index.at(p.at("left").get<std::string>());
        int r = spec->index.at(p.at("right").get<std::string>());
        spec->set_product(l, r, lincomb_from_json(p.at("result"), spec->index));
    }
    for (const auto& p : j.value("differential", nlohmann::json::array())) {
        int l = spec->index.at(p.at("gen").get<std::string>());
        spec->set_differential(l, lincomb_from_json(p.at("result"), spec->index));
    }
    AlgebraPtr out = spec;
    validate_algebra(out);
    return out;
}

inline nlohmann::json lincomb_to_json(const SparseVec& v, const std::vector<std::string>& names) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [i, c] : v)
        arr.push_back({{"gen", names[i]}, {"coeff", scalar_to_string(c)}});
    return arr;
}

inline nlohmann::json algebra_to_json(const AlgebraPtr& alg) {
    const auto& A = *alg;
    nlohmann::json j;
    j["kind"] = A.kind == AlgKind::DgLie ? "dg-lie" : "left-unital-pre-lie";
    j["basis"] = nlohmann::json::array();
    for (size_t i = 0; i < A.dim(); ++i)
        j["basis"].push_back(
            {{"name", A.names[i]}, {"degree", A.degree[i]}, {"weight", A.weight[i]}});
    if (A.unit >= 0) j["unit"] = A.names[A.unit];
    j["product"] = nlohmann::json::array();
    for (const auto& [ij, v] : A.product)
        j["product"].push_back({{"left", A.names[ij.first]},
                                {"right", A.names[ij.second]},
                                {"result", lincomb_to_json(v, A.names)}});
    j["differential"] = nlohmann::json::array();
    for (const auto& [i, v] : A.differential)
        j["differential"].push_back({{"gen", A.names[i]}, {"result", lincomb_to_json(v, A.names)}});
    return j;
}

} // namespace mcx

#endif
