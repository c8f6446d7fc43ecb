#include "bethe_forge/nesting.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace bf {

namespace {

TensorOperator zero_like(const Twist& tw) { return TensorOperator(tw.dim(), tw.sites()); }

void require_index(const Twist& tw, int j, const char* what) {
    if (j < 1 || j > tw.dim()) throw ConfigError(std::string(what) + ": index out of range");
}

// product of the residue-limit factors over the complement of I
NilJet pole_product(const JetMatrix& G, const Twist& tw, IndexSet I, const std::vector<int>& row, LimitOrder order) {
    auto js = I.complement(tw.dim()).elements();
    if (order == LimitOrder::Descending) std::reverse(js.begin(), js.end());
    NilJet acc = NilJet::scalar(G[0][0].shape(), 1);
    for (int j : js) acc = acc * pole_factor(G, tw, j, row);
    return acc;
}

// coefficients of 1/w_{Ibar}(z) = sdet(1 - z g_{Ibar}) up to z^order
std::vector<Rat> inverse_w_series(const Twist& tw, IndexSet Ibar, int order) {
    std::vector<Rat> c(static_cast<std::size_t>(order + 1), Rat(0));
    c[0] = 1;
    for (int j : Ibar.elements()) {
        const Rat& x = tw.eigenvalue(j);
        if (tw.fermionic(j)) {
            for (int k = 1; k <= order; ++k) c[static_cast<std::size_t>(k)] += x * c[static_cast<std::size_t>(k - 1)];
        } else {
            for (int k = order; k >= 1; --k) c[static_cast<std::size_t>(k)] -= x * c[static_cast<std::size_t>(k - 1)];
        }
    }
    return c;
}

TensorOperator operator_det(const std::vector<std::vector<TensorOperator>>& m, const TensorOperator& zero,
                            const TensorOperator& one) {
    return laplace_det<TensorOperator>(m, zero, one, [](const TensorOperator& a, const TensorOperator& b) { return op_mul(a, b); });
}

}  // namespace

Rat nesting_shift(IndexSet I, const Twist& tw) {
    int shift = 0;
    for (int j : I.complement(tw.dim()).elements()) shift += tw.fermionic(j) ? -2 : 2;
    return Rat(shift);
}

std::vector<NormalizerFactor> normalizer(IndexSet I, const Twist& tw) {
    std::vector<NormalizerFactor> out;
    const TensorOperator shape = zero_like(tw);
    for (int j : I.complement(tw.dim()).elements()) {
        NormalizerFactor f;
        f.j = j;
        for (int r = 0; r < shape.size(); ++r) f.diagonal.push_back(normalizer_row(tw, j, shape.tuple(r)));
        out.push_back(std::move(f));
    }
    return out;
}

TensorOperator q_operator(IndexSet I, const Twist& tw, LimitOrder order) {
    auto f = [&](const JetMatrix& G, const std::vector<int>& row) {
        return std::vector<NilJet>{pole_product(G, tw, I, row, order)};
    };
    TensorOperator q = coderivative_rows(tw, nesting_shift(I, tw), 1, f).front();
    if (q.max_degree() > tw.sites()) throw DegreeOverflow("q_operator: degree exceeds N");
    return q;
}

std::vector<TensorOperator> t_series(IndexSet I, const Twist& tw, int sMax) {
    if (sMax < 0) return {};
    auto f = [&](const JetMatrix& G, const std::vector<int>& row) {
        NilJet p = pole_product(G, tw, I, row, LimitOrder::Ascending);
        LJet w = jet_w(G, tw, Rat(0), Rat(1), 1, 0, sMax);
        std::vector<NilJet> out;
        for (int k = 0; k <= sMax; ++k) out.push_back(w.at(k) * p);
        return out;
    };
    auto W = coderivative_rows(tw, nesting_shift(I, tw), sMax + 1, f);
    const auto c = inverse_w_series(tw, I.complement(tw.dim()), sMax);
    std::vector<TensorOperator> T;
    for (int s = 0; s <= sMax; ++s) {
        TensorOperator acc = zero_like(tw);
        for (int k = 0; k <= s; ++k)
            if (!is_zero(c[static_cast<std::size_t>(k)])) acc += W[static_cast<std::size_t>(s - k)] * PolyU(c[static_cast<std::size_t>(k)]);
        T.push_back(std::move(acc));
    }
    return T;
}

TensorOperator t_sym(IndexSet I, int s, const Twist& tw) {
    if (s < 0) return zero_like(tw);
    return t_series(I, tw, s).back();
}

namespace {

// nested BR determinant from a precomputed series T[0..], T[0] = Q_I
TensorOperator young_from_series(const std::vector<TensorOperator>& T, const YoungDiagram& lambda, const Twist& tw) {
    const int a = lambda.height();
    const TensorOperator zero = zero_like(tw);
    const TensorOperator one = TensorOperator::identity(tw.dim(), tw.sites());
    std::vector<std::vector<TensorOperator>> m(static_cast<std::size_t>(a), std::vector<TensorOperator>(static_cast<std::size_t>(a), zero));
    for (int i = 1; i <= a; ++i)
        for (int j = 1; j <= a; ++j) {
            const int s = lambda.row(j - 1) + i - j;
            if (s >= 0) m[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] = T[static_cast<std::size_t>(s)].shift(Rat(2 - 2 * i));
        }
    TensorOperator num = operator_det(m, zero, one);
    if (a == 1) return num;
    TensorOperator den = one;
    for (int k = 1; k < a; ++k) den = op_mul(den, T[0].shift(Rat(-2 * k)));
    return op_left_divide(den, num);
}

// memoized rectangles T_I^{(a,s)} sharing one series computation
class RectTable {
public:
    RectTable(IndexSet I, const Twist& tw, int aMax, int sMax) : tw_(tw), series_(t_series(I, tw, aMax + sMax)) {}
    const TensorOperator& operator()(int a, int s) {
        auto key = std::pair{a, s};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        TensorOperator v;
        if (a < 0 || s < 0) v = zero_like(tw_);
        else if (a == 0 || s == 0) v = series_[0];
        else v = young_from_series(series_, YoungDiagram::rectangle(a, s), tw_);
        return cache_.emplace(key, std::move(v)).first->second;
    }

private:
    const Twist& tw_;
    std::vector<TensorOperator> series_;
    std::map<std::pair<int, int>, TensorOperator> cache_;
};

}  // namespace

TensorOperator t_young(IndexSet I, const YoungDiagram& lambda, const Twist& tw) {
    const int a = lambda.height();
    if (a == 0) return q_operator(I, tw);
    return young_from_series(t_series(I, tw, lambda.row(0) + a - 1), lambda, tw);
}

TensorOperator t_rect(IndexSet I, int a, int s, const Twist& tw) {
    if (a < 0 || s < 0) return zero_like(tw);
    if (a == 0 || s == 0) return q_operator(I, tw);
    return t_young(I, YoungDiagram::rectangle(a, s), tw);
}

TensorOperator wronskian_q(IndexSet I, IndexSet J, const Twist& tw) {
    if ((I.mask() & J.mask()) != 0) throw ConfigError("wronskian_q: I and J must be disjoint");
    if ((J.mask() & tw.fermion_mask()) != 0) throw ConfigError("wronskian_q: J must contain bosonic indices only");
    const auto js = J.elements();
    const int n = static_cast<int>(js.size());
    if (n == 0) return q_operator(I, tw);
    const TensorOperator zero = zero_like(tw);
    const TensorOperator one = TensorOperator::identity(tw.dim(), tw.sites());
    std::vector<std::vector<TensorOperator>> m(static_cast<std::size_t>(n));
    std::vector<std::vector<Rat>> vm(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        const int j = js[static_cast<std::size_t>(r)];
        const TensorOperator qj = q_operator(I.with(j), tw);
        for (int k = 0; k < n; ++k) {
            Rat xp = 1;
            for (int e = 0; e < n - 1 - k; ++e) xp *= tw.eigenvalue(j);
            vm[static_cast<std::size_t>(r)].push_back(xp);
            m[static_cast<std::size_t>(r)].push_back(qj.shift(Rat(-2 * k)) * PolyU(xp));
        }
    }
    const Rat vdet = laplace_det<Rat>(vm, Rat(0), Rat(1), [](const Rat& a, const Rat& b) { return Rat(a * b); });
    TensorOperator num = operator_det(m, zero, one);
    const TensorOperator q = q_operator(I, tw);
    TensorOperator den = TensorOperator::identity(tw.dim(), tw.sites(), PolyU(vdet));
    for (int k = 1; k < n; ++k) den = op_mul(den, q.shift(Rat(-2 * k)));
    return op_left_divide(den, num);
}

TensorOperator check_tq(IndexSet I, int j, int s, const Twist& tw) {
    require_index(tw, j, "check_tq");
    if (I.contains(j)) throw ConfigError("check_tq: j must lie outside I");
    if (s < 0) throw ConfigError("check_tq: s must be nonnegative");
    const IndexSet Ij = I.with(j);
    const auto TI = t_series(I, tw, s);
    const auto TIj = t_series(Ij, tw, s);
    const TensorOperator QI = TI[0], QIj = TIj[0];
    TensorOperator lhs = op_mul(TI[static_cast<std::size_t>(s)], QIj);
    TensorOperator rhs = op_mul(TIj[static_cast<std::size_t>(s)], QI);
    if (s >= 1) rhs -= op_mul(TIj[static_cast<std::size_t>(s - 1)].shift(2), QI.shift(-2)) * PolyU(tw.eigenvalue(j));
    return lhs - rhs;
}

TensorOperator check_qq(IndexSet I, int i, int j, const Twist& tw) {
    require_index(tw, i, "check_qq");
    require_index(tw, j, "check_qq");
    if (i == j || I.contains(i) || I.contains(j)) throw ConfigError("check_qq: need distinct i, j outside I");
    const Rat& xi = tw.eigenvalue(i);
    const Rat& xj = tw.eigenvalue(j);
    const TensorOperator q = q_operator(I, tw), qi = q_operator(I.with(i), tw), qj = q_operator(I.with(j), tw),
                         qij = q_operator(I.with(i).with(j), tw);
    TensorOperator lhs = op_mul(q.shift(-2), qij) * PolyU(xi - xj);
    TensorOperator rhs = op_mul(qj.shift(-2), qi) * PolyU(xi) - op_mul(qj, qi.shift(-2)) * PolyU(xj);
    return lhs - rhs;
}

TensorOperator check_hirota(IndexSet I, int a, int s, const Twist& tw) {
    if (a < 1 || s < 1) throw ConfigError("check_hirota: need a, s >= 1");
    RectTable T(I, tw, a + 1, s + 1);
    const TensorOperator t = T(a, s);
    TensorOperator lhs = op_mul(t.shift(1), t.shift(-1));
    TensorOperator rhs = op_mul(T(a + 1, s).shift(1), T(a - 1, s).shift(-1)) + op_mul(T(a, s + 1).shift(-1), T(a, s - 1).shift(1));
    return lhs - rhs;
}

std::pair<TensorOperator, TensorOperator> check_bt(IndexSet I, int j, int a, int s, const Twist& tw) {
    require_index(tw, j, "check_bt");
    if (I.contains(j)) throw ConfigError("check_bt: j must lie outside I");
    if (tw.fermionic(j)) throw ConfigError("check_bt: j must be bosonic");
    if (a < 0 || s < 0) throw ConfigError("check_bt: need a, s >= 0");
    const IndexSet Ij = I.with(j);
    const PolyU x(tw.eigenvalue(j));
    RectTable TI(I, tw, a + 1, s + 1), TIj(Ij, tw, a + 1, s + 1);
    auto T = [&](IndexSet J, int aa, int ss) -> const TensorOperator& { return J == I ? TI(aa, ss) : TIj(aa, ss); };
    TensorOperator r1 = op_mul(T(Ij, a + 1, s), T(I, a, s)) - op_mul(T(Ij, a, s), T(I, a + 1, s)) -
                        op_mul(T(Ij, a + 1, s - 1).shift(2), T(I, a, s + 1).shift(-2)) * x;
    TensorOperator r2 = op_mul(T(Ij, a, s + 1), T(I, a, s)) - op_mul(T(Ij, a, s), T(I, a, s + 1)) -
                        op_mul(T(Ij, a + 1, s).shift(2), T(I, a - 1, s + 1).shift(-2)) * x;
    return {r1, r2};
}

std::vector<TensorOperator> gen_series_t(const NestingPath& path, const Twist& tw, int sMax) {
    if (path.length() != tw.dim()) throw ConfigError("gen_series_t: path length must equal K + M");
    const TensorOperator zero = zero_like(tw);
    // level 0: the series is Q_empty at z^0
    std::vector<TensorOperator> W(static_cast<std::size_t>(sMax + 1), zero);
    TensorOperator q_prev = q_operator(path.level(0), tw);
    W[0] = q_prev;
    for (int k = 1; k <= path.length(); ++k) {
        const int j = path.added(k);
        const TensorOperator q = q_operator(path.level(k), tw);
        const PolyU x(tw.eigenvalue(j));
        std::vector<TensorOperator> next(static_cast<std::size_t>(sMax + 1), zero);
        for (int s = 0; s <= sMax; ++s) {
            // cleared forms of the one-step recursions:
            //   boson:   Q_prev W_k = Q_k W_prev + x Q_prev(u-2) z W_k(u+2)
            //   fermion: Q_prev W_k = Q_k W_prev - y Q_k(u-2) z W_prev(u+2)
            TensorOperator rhs = op_mul(q, W[static_cast<std::size_t>(s)]);
            if (s >= 1) {
                if (tw.fermionic(j))
                    rhs -= op_mul(q.shift(-2), W[static_cast<std::size_t>(s - 1)].shift(2)) * x;
                else
                    rhs += op_mul(q_prev.shift(-2), next[static_cast<std::size_t>(s - 1)].shift(2)) * x;
            }
            next[static_cast<std::size_t>(s)] = op_left_divide(q_prev, rhs);
            if (op_mul(q_prev, next[static_cast<std::size_t>(s)]) != rhs)
                throw ExactDivisionFailed("gen_series_t: recursion is not polynomial");
        }
        W = std::move(next);
        q_prev = q;
    }
    return W;
}

std::string hasse_export(int K, int M, const NestingPath* highlight) {
    const int n = K + M;
    if (K < 0 || M < 0 || n < 1) throw ConfigError("hasse: need K + M >= 1");
    if (n > 6) throw ConfigError("hasse: K + M must not exceed 6");
    auto label = [](IndexSet I) { return I.size() == 0 ? std::string("Q_{}") : "Q_" + I.str(); };
    std::vector<IndexSet> nodes;
    for (std::uint32_t m = 0; m < (1u << n); ++m) nodes.emplace_back(m);
    std::stable_sort(nodes.begin(), nodes.end(), [](IndexSet a, IndexSet b) {
        return a.size() != b.size() ? a.size() < b.size() : a.mask() < b.mask();
    });
    auto on_path = [&](IndexSet lo, IndexSet hi) {
        if (!highlight) return false;
        for (int k = 1; k <= highlight->length(); ++k)
            if (highlight->level(k - 1) == lo && highlight->level(k) == hi) return true;
        return false;
    };
    std::ostringstream os;
    os << "graph hasse {\n  rankdir=BT;\n  node [shape=plaintext];\n";
    for (IndexSet I : nodes) os << "  n" << I.mask() << " [label=\"" << label(I) << "\"];\n";
    for (IndexSet I : nodes)
        for (int j = 1; j <= n; ++j) {
            if (I.contains(j)) continue;
            const IndexSet up = I.with(j);
            const bool thick = on_path(I, up);
            os << "  n" << I.mask() << " -- n" << up.mask() << " [style=" << (j > K ? "dashed" : "solid");
            if (thick || j > K) os << ", color=red";
            if (thick) os << ", penwidth=3";
            os << "];\n";
        }
    os << "}\n";
    return os.str();
}

}  // namespace bf
