#include "bethe_forge/coderiv.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <optional>

#include "bethe_forge/parallel.hpp"

namespace bf {

namespace {

LJet lj_zero(const JetShape& s, int lo, int hi) { return LJet(lo, hi, NilJet(s)); }

LJet lj_const(const JetShape& s, int lo, int hi, const NilJet& c) {
    LJet r = lj_zero(s, lo, hi);
    if (r.in_window(0)) r.at(0) = c;
    return r;
}

LJet lj_scale(const NilJet& c, const LJet& x) {
    LJet r(x.lo(), x.hi(), x.zero());
    for (int k = x.lo(); k <= x.hi(); ++k)
        if (!x.at(k).is_zero()) r.at(k) = c * x.at(k);
    return r;
}

// lowest order whose coefficient has a nonzero body, or hi+1
int body_order(const LJet& f) {
    for (int k = f.lo(); k <= f.hi(); ++k)
        if (!is_zero(f.at(k).body())) return k;
    return f.hi() + 1;
}


RatMatrix body_matrix(const LJetMatrix& m) {
    RatMatrix b(m.size(), std::vector<Rat>(m.empty() ? 0 : m[0].size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) b[i][j] = m[i][j].at(0).body();
    return b;
}

LJetMatrix mat_mul(const LJetMatrix& a, const LJetMatrix& b, const LJet& zero) {
    const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    LJetMatrix r(n, std::vector<LJet>(m, zero));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < k; ++l)
                if (!is_zero(a[i][l]) && !is_zero(b[l][j])) r[i][j] += a[i][l] * b[l][j];
    return r;
}

LJetMatrix mat_sub(LJetMatrix a, const LJetMatrix& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] -= b[i][j];
    return a;
}

bool mat_is_zero(const LJetMatrix& a) {
    for (const auto& row : a)
        for (const auto& x : row)
            if (!is_zero(x)) return false;
    return true;
}

// Inverse of a square matrix whose order-0 body is invertible; Neumann series in the rest.
LJetMatrix mat_inverse(const LJetMatrix& m, const JetShape& s, int lo, int hi) {
    const std::size_t n = m.size();
    LJet zero = lj_zero(s, lo, hi);
    auto body_inv = rat_inverse(body_matrix(m));
    if (!body_inv) throw PoleHit("matrix inverse: singular body");
    LJetMatrix binv(n, std::vector<LJet>(n, zero));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            binv[i][j] = lj_const(s, lo, hi, NilJet::scalar(s, (*body_inv)[i][j]));
    LJetMatrix rest = m;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rest[i][j].at(0) -= NilJet::scalar(s, rest[i][j].at(0).body());
    // X = -B^{-1} R ; inverse = sum_k X^k B^{-1}
    LJetMatrix x = mat_mul(binv, rest, zero);
    for (auto& row : x)
        for (auto& e : row) e = Rat(-1) * e;
    LJetMatrix acc = binv, term = binv;
    for (int it = 0; it < s.levels + (hi - lo) + 2; ++it) {
        term = mat_mul(x, term, zero);
        if (mat_is_zero(term)) break;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) acc[i][j] += term[i][j];
    }
    return acc;
}

LJetMatrix block(const LJetMatrix& m, int r0, int r1, int c0, int c1) {
    LJetMatrix b;
    for (int i = r0; i < r1; ++i) {
        std::vector<LJet> row;
        for (int j = c0; j < c1; ++j) row.push_back(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        b.push_back(std::move(row));
    }
    return b;
}

// prod over sites not in the mask of (u - theta_i + shift), for every mask
std::vector<PolyU> site_products(const Twist& tw, const Rat& shift) {
    const int n = tw.sites();
    std::vector<PolyU> out(static_cast<std::size_t>(1) << n);
    for (std::uint32_t mask = 0; mask < out.size(); ++mask) {
        PolyU p(1);
        for (int i = 0; i < n; ++i)
            if (!((mask >> i) & 1u)) p = p * PolyU::linear(shift - tw.theta[static_cast<std::size_t>(i)], 1);
        out[mask] = p;
    }
    return out;
}

std::vector<std::vector<int>> all_rows(int dim, int sites) {
    TensorOperator shape(dim, sites);
    std::vector<std::vector<int>> rows;
    for (int r = 0; r < shape.size(); ++r) rows.push_back(shape.tuple(r));
    return rows;
}

TensorOperator scale_argument(const TensorOperator& op, const Rat& a) {
    // p(u) -> p(a u)
    TensorOperator r(op.local_dim(), op.sites());
    for (int i = 0; i < op.size(); ++i)
        for (int j = 0; j < op.size(); ++j) {
            const auto& c = op.at(i, j).coeffs();
            std::vector<Rat> d(c.size());
            Rat pw = 1;
            for (std::size_t k = 0; k < c.size(); ++k) {
                d[k] = c[k] * pw;
                pw *= a;
            }
            r.at(i, j) = PolyU(d);
        }
    return r;
}

}  // namespace

std::optional<RatMatrix> rat_inverse(RatMatrix a) {
    const std::size_t n = a.size();
    RatMatrix inv(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && is_zero(a[p][c])) ++p;
        if (p == n) return std::nullopt;
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        Rat d = 1 / a[c][c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c][k] *= d;
            inv[c][k] *= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || is_zero(a[r][c])) continue;
            Rat f = a[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

RatMatrix diagonal_twist_matrix(const Twist& tw) {
    RatMatrix g(static_cast<std::size_t>(tw.dim()), std::vector<Rat>(static_cast<std::size_t>(tw.dim()), Rat(0)));
    for (int a = 0; a < tw.dim(); ++a) g[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] = tw.xi[static_cast<std::size_t>(a)];
    return g;
}

JetMatrix perturbed_group(const JetShape& shape, const RatMatrix& g, const std::vector<int>& row) {
    const int d = shape.dim;
    JetMatrix x(static_cast<std::size_t>(d), std::vector<NilJet>(static_cast<std::size_t>(d), NilJet(shape)));
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c) x[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = NilJet::scalar(shape, g[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)]);
    for (int n = 0; n < shape.levels; ++n) {
        const int k = row[static_cast<std::size_t>(n)];
        if (k < 0) continue;   // level switched off
        const auto src = x[static_cast<std::size_t>(k)];
        for (int a = 0; a < d; ++a) {
            NilJet v = NilJet::var(shape, n, a, k);
            for (int c = 0; c < d; ++c)
                if (!src[static_cast<std::size_t>(c)].is_zero()) x[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] += v * src[static_cast<std::size_t>(c)];
        }
    }
    return x;
}

LJet jet_det(const LJetMatrix& m, const LJet& zero, const LJet& one) {
    const std::size_t n = m.size();
    if (n <= 3) return laplace_det<LJet>(m, zero, one, [](const LJet& a, const LJet& b) { return a * b; });
    // Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k
    LJetMatrix mk(n, std::vector<LJet>(n, zero));
    LJet c = one;
    for (std::size_t k = 1; k <= n; ++k) {
        LJetMatrix next = mat_mul(m, mk, zero);
        for (std::size_t i = 0; i < n; ++i) next[i][i] += c;
        mk = std::move(next);
        LJetMatrix am = mat_mul(m, mk, zero);
        LJet tr = zero;
        for (std::size_t i = 0; i < n; ++i) tr += am[i][i];
        c = Rat(-1) / Rat(static_cast<long>(k)) * tr;
    }
    return (n % 2 ? Rat(-1) : Rat(1)) * c;
}

LJet laurent_inverse(const LJet& f) {
    const int m = body_order(f);
    if (m > f.hi()) throw PoleHit("laurent_inverse: no invertible order in window");
    NilJet lead_inv = f.at(m).inverse();
    // f = eps^m f_m (1 + Y)
    LJet y = lj_scale(lead_inv, f.shifted(-m));
    y.at(0) -= NilJet::scalar(f.zero().shape(), Rat(1));
    LJet minus_y = Rat(-1) * y;
    LJet acc = lj_const(f.zero().shape(), f.lo(), f.hi(), NilJet::scalar(f.zero().shape(), 1));
    LJet term = acc;
    const int limit = f.zero().shape().levels + (f.hi() - f.lo()) + 2;
    for (int it = 0; it < limit; ++it) {
        term = term * minus_y;
        if (is_zero(term)) break;
        acc += term;
    }
    return lj_scale(lead_inv, acc).shifted(-m);
}

LJet jet_w(const JetMatrix& G, const Twist& tw, const Rat& t0, const Rat& t1, int exponent, int lo, int hi) {
    const JetShape s = G.empty() ? tw.jet_shape() : G[0][0].shape();
    const int d = tw.dim(), K = tw.K;
    const LJet zero = lj_zero(s, lo, hi);
    const LJet one = lj_const(s, lo, hi, NilJet::scalar(s, 1));
    LJetMatrix x(static_cast<std::size_t>(d), std::vector<LJet>(static_cast<std::size_t>(d), zero));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            LJet e = zero;
            const NilJet& gab = G[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            if (e.in_window(0)) e.at(0) = (a == b ? NilJet::scalar(s, 1) : NilJet(s)) - t0 * gab;
            if (e.in_window(1) && !is_zero(t1)) e.at(1) = -(t1 * gab);
            x[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = std::move(e);
        }
    LJetMatrix A = block(x, 0, K, 0, K), B = block(x, 0, K, K, d), C = block(x, K, d, 0, K), D = block(x, K, d, K, d);
    auto invertible = [](const LJetMatrix& m) { return m.empty() || rat_inverse(body_matrix(m)).has_value(); };
    LJet regular = one, singular = one;   // sdet = regular/singular or singular/regular per branch
    bool bosonic_branch;
    if (invertible(D)) {
        // sdet = det(A - B D^{-1} C) / det D
        LJetMatrix schur = A;
        if (!D.empty()) schur = mat_sub(A, mat_mul(mat_mul(B, mat_inverse(D, s, lo, hi), zero), C, zero));
        singular = jet_det(schur, zero, one);
        regular = jet_det(D, zero, one);
        bosonic_branch = true;
    } else if (invertible(A)) {
        // sdet = det A / det(D - C A^{-1} B)
        LJetMatrix schur = mat_sub(D, mat_mul(mat_mul(C, mat_inverse(A, s, lo, hi), zero), B, zero));
        singular = jet_det(schur, zero, one);
        regular = jet_det(A, zero, one);
        bosonic_branch = false;
    } else {
        throw PoleHit("jet_w: t hits both a bosonic and a fermionic pole");
    }
    // w = 1/sdet
    const bool want_sdet = exponent < 0;
    if (bosonic_branch)   // sdet = singular / regular
        return want_sdet ? singular * laurent_inverse(regular) : regular * laurent_inverse(singular);
    // sdet = regular / singular
    return want_sdet ? regular * laurent_inverse(singular) : singular * laurent_inverse(regular);
}

PolyU normalizer_row(const Twist& tw, int j, const std::vector<int>& row) {
    const Rat& xi = tw.eigenvalue(j);
    const Rat t0 = 1 / xi;
    // (1 - xi t) prod_i (1 - xi_{k_i} t) at t = 1/xi + eps
    PolyU b = PolyU::linear(0, -xi);
    for (int k : row) {
        const Rat& xk = tw.xi[static_cast<std::size_t>(k)];
        b = b * PolyU::linear(1 - xk * t0, -xk);
    }
    return b;
}

NilJet pole_factor(const JetMatrix& G, const Twist& tw, int j, const std::vector<int>& row) {
    const JetShape s = G[0][0].shape();
    const int n = s.levels;
    const int lo = -(n + 1), hi = n + 1;
    const Rat& xi = tw.eigenvalue(j);
    const Rat t0 = 1 / xi;
    LJet w = jet_w(G, tw, t0, Rat(1), tw.fermionic(j) ? -1 : 1, lo, hi);
    const PolyU b = normalizer_row(tw, j, row);
    LJet bj = lj_zero(s, lo, hi);
    for (int k = 0; k <= b.degree() && k <= hi; ++k) bj.at(k) = NilJet::scalar(s, b.coeff(k));
    return laurent_limit(bj * w);
}

void extract_row(const NilJet& jet, const std::vector<int>& row, const std::vector<PolyU>& site_factor_products,
                 const Twist& tw, TensorOperator& out) {
    const int n = static_cast<int>(row.size());
    const std::uint32_t ferm = tw.fermion_mask();
    auto par = [&](int a) { return static_cast<int>((ferm >> a) & 1u); };
    const int r = out.index(row);
    std::vector<int> col(row);
    for (const auto& term : jet.terms()) {
        // odd variables pick up (-1)^{p_a} and a Koszul sign from the odd row
        // labels on the sites to their left
        int parity_sum = 0;
        int left_parity = 0;
        for (int i = 0; i < n; ++i) {
            const int k = row[static_cast<std::size_t>(i)];
            if ((term.levels >> i) & 1u) {
                const int a = jet.pair_at(term.key, i).first;
                col[static_cast<std::size_t>(i)] = a;
                parity_sum += par(a) + (par(a) + par(k)) * left_parity;
            } else {
                col[static_cast<std::size_t>(i)] = k;
            }
            left_parity += par(k);
        }
        Rat coef = term.c;
        coef *= Rat(1L << std::popcount(term.levels));
        if (parity_sum & 1) coef = -coef;
        out.at(r, out.index(col)) += site_factor_products[term.levels] * coef;
    }
}

std::vector<TensorOperator> coderivative_rows(const Twist& tw, const Rat& uShift, int outputs, const JetFunction& f,
                                              const RatMatrix* g) {
    const JetShape shape = tw.jet_shape();
    const RatMatrix gm = g ? *g : diagonal_twist_matrix(tw);
    const auto rows = all_rows(tw.dim(), tw.sites());
    const auto prods = site_products(tw, uShift);
    std::vector<std::vector<NilJet>> values(rows.size());
    parallel_for(rows.size(), [&](std::size_t r) {
        JetMatrix G = perturbed_group(shape, gm, rows[r]);
        values[r] = f(G, rows[r]);
    });
    std::vector<TensorOperator> out(static_cast<std::size_t>(outputs), TensorOperator(tw.dim(), tw.sites()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int o = 0; o < outputs && o < static_cast<int>(values[r].size()); ++o)
            extract_row(values[r][static_cast<std::size_t>(o)], rows[r], prods, tw, out[static_cast<std::size_t>(o)]);
    return out;
}

namespace {

NilJet point_product(const JetMatrix& G, const Twist& tw, const std::vector<WFactor>& factors) {
    const JetShape s = G[0][0].shape();
    NilJet acc = NilJet::scalar(s, 1);
    for (const auto& fct : factors) acc = acc * jet_w(G, tw, fct.t, Rat(0), fct.exponent, 0, 0).at(0);
    return acc;
}

std::vector<NilJet> series_values(const JetMatrix& G, const Twist& tw, int sMax) {
    LJet w = jet_w(G, tw, Rat(0), Rat(1), 1, 0, sMax);
    std::vector<NilJet> out;
    for (int k = 0; k <= sMax; ++k) out.push_back(w.at(k));
    return out;
}

}  // namespace

TensorOperator coderivative_apply(const WSpec& spec) {
    auto f = [&](const JetMatrix& G, const std::vector<int>&) {
        return std::vector<NilJet>{point_product(G, spec.tw, spec.factors)};
    };
    return coderivative_rows(spec.tw, spec.uShift, 1, f).front();
}

TensorOperator diagram_oracle(const Twist& tw, const Rat& t) {
    if (tw.M != 0) throw ConfigError("diagram_oracle: bosonic twists only");
    const int n = tw.sites();
    TensorOperator op(tw.dim(), n);
    Rat w = gen_w(t, tw, IndexSet::full(tw.dim()));
    std::vector<int> sigma(static_cast<std::size_t>(n));
    for (int r = 0; r < op.size(); ++r) {
        auto k = op.tuple(r);
        std::iota(sigma.begin(), sigma.end(), 0);
        do {
            std::vector<int> l(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) l[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = k[static_cast<std::size_t>(i)];
            PolyU term(w);
            for (int i = 0; i < n; ++i) {
                const Rat& x = tw.xi[static_cast<std::size_t>(k[static_cast<std::size_t>(i)])];
                Rat xt = x * t;
                Rat frac = (sigma[static_cast<std::size_t>(i)] > i ? 2 * xt : Rat(2)) / (1 - xt);
                if (sigma[static_cast<std::size_t>(i)] == i)
                    term = term * PolyU::linear(frac - tw.theta[static_cast<std::size_t>(i)], 1);
                else
                    term = term * frac;
            }
            op.at(r, op.index(l)) += term;
        } while (std::next_permutation(sigma.begin(), sigma.end()));
    }
    return op;
}

TensorOperator diagram_oracle_normalized(const Twist& tw, const Rat& t) {
    if (tw.M != 0) throw ConfigError("diagram_oracle: bosonic twists only");
    const int n = tw.sites();
    TensorOperator op(tw.dim(), n);
    Rat w = gen_w(t, tw, IndexSet::full(tw.dim()));
    std::vector<int> sigma(static_cast<std::size_t>(n));
    for (int r = 0; r < op.size(); ++r) {
        auto k = op.tuple(r);
        std::iota(sigma.begin(), sigma.end(), 0);
        do {
            std::vector<int> l(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) l[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = k[static_cast<std::size_t>(i)];
            PolyU term(w);
            for (int i = 0; i < n; ++i) {
                const Rat& x = tw.xi[static_cast<std::size_t>(k[static_cast<std::size_t>(i)])];
                Rat xt = x * t;
                Rat two = sigma[static_cast<std::size_t>(i)] > i ? 2 * xt : Rat(2);
                if (sigma[static_cast<std::size_t>(i)] == i)
                    term = term * (PolyU::linear(-tw.theta[static_cast<std::size_t>(i)], 1) * (1 - xt) + PolyU(two));
                else
                    term = term * two;
            }
            op.at(r, op.index(l)) += term;
        } while (std::next_permutation(sigma.begin(), sigma.end()));
    }
    return op;
}

std::vector<TensorOperator> transfer_series(const Twist& tw, int sMax, const Rat& uShift, const std::vector<WFactor>& extra) {
    auto f = [&](const JetMatrix& G, const std::vector<int>&) {
        auto v = series_values(G, tw, sMax);
        if (!extra.empty()) {
            NilJet p = point_product(G, tw, extra);
            for (auto& x : v) x = x * p;
        }
        return v;
    };
    return coderivative_rows(tw, uShift, sMax + 1, f);
}

TensorOperator transfer_matrix(const YoungDiagram& lambda, const Twist& tw, const Rat& uShift) {
    const int a = lambda.height();
    if (a == 0) return TensorOperator::identity(tw.dim(), tw.sites(), site_products(tw, uShift).front());
    const int top = lambda.row(0) + a;
    auto f = [&](const JetMatrix& G, const std::vector<int>&) {
        const JetShape s = G[0][0].shape();
        auto chi = series_values(G, tw, top);
        std::vector<std::vector<NilJet>> m(static_cast<std::size_t>(a), std::vector<NilJet>(static_cast<std::size_t>(a), NilJet(s)));
        for (int i = 0; i < a; ++i)
            for (int j = 0; j < a; ++j) {
                int idx = jacobi_trudi_index(lambda, i, j);
                if (idx >= 0) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = chi[static_cast<std::size_t>(idx)];
            }
        return std::vector<NilJet>{laplace_det<NilJet>(m, NilJet(s), NilJet::scalar(s, 1),
                                                       [](const NilJet& x, const NilJet& y) { return x * y; })};
    };
    return coderivative_rows(tw, uShift, 1, f).front();
}

void check_size(const Twist& tw, bool override_guard) {
    if (override_guard) return;
    if (tw.sites() > 5 || tw.dim() > 4)
        throw ConfigError("size guard: need N <= 5 and K+M <= 4 (got N=" + std::to_string(tw.sites()) +
                          ", K+M=" + std::to_string(tw.dim()) + ")");
}

PolyU phi_poly(const Twist& tw) { return site_products(tw, 0).front(); }

TensorOperator check_master(const Twist& tw, const Rat& z, const Rat& t, const std::vector<WFactor>& extra) {
    auto W = [&](const Rat& shift, std::vector<WFactor> fs) {
        fs.insert(fs.end(), extra.begin(), extra.end());
        return coderivative_apply(WSpec{tw, shift, fs});
    };
    const WFactor wz{z, 1}, wt{t, 1};
    TensorOperator lhs = W(2, {wz, wt}) * W(0, {}) * PolyU(t - z);
    TensorOperator rhs = W(0, {wz}) * W(2, {wt}) * PolyU(t) - W(2, {wz}) * W(0, {wt}) * PolyU(z);
    return lhs - rhs;
}

TensorOperator w_operator(const Twist& tw, const std::vector<Rat>& zList, IndexSet I, const Rat& uShift) {
    std::vector<WFactor> fs;
    for (int k : I.elements()) fs.push_back(WFactor{zList.at(static_cast<std::size_t>(k - 1)), 1});
    return coderivative_apply(WSpec{tw, uShift, fs});
}

TensorOperator check_plucker(const Twist& tw, const std::vector<Rat>& zList, IndexSet I, int i, int j) {
    if (i == j || I.contains(i) || I.contains(j)) throw ConfigError("check_plucker: need distinct i, j outside I");
    const Rat& zi = zList.at(static_cast<std::size_t>(i - 1));
    const Rat& zj = zList.at(static_cast<std::size_t>(j - 1));
    auto W = [&](IndexSet s, int shift) { return w_operator(tw, zList, s, Rat(shift)); };
    TensorOperator lhs = W(I.with(i).with(j), 2) * W(I, 0) * PolyU(zi - zj);
    TensorOperator rhs = W(I.with(j), 0) * W(I.with(i), 2) * PolyU(zi) - W(I.with(j), 2) * W(I.with(i), 0) * PolyU(zj);
    return lhs - rhs;
}

namespace {

TensorOperator operator_det(const std::vector<std::vector<TensorOperator>>& m, const TensorOperator& zero,
                            const TensorOperator& one) {
    return laplace_det<TensorOperator>(m, zero, one, [](const TensorOperator& a, const TensorOperator& b) { return op_mul(a, b); });
}

TensorOperator divide_by_scalar(const TensorOperator& a, const PolyU& p) {
    TensorOperator r(a.local_dim(), a.sites());
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) r.at(i, j) = poly_div_exact(a.at(i, j), p);
    return r;
}

}  // namespace

TensorOperator check_master_det(const Twist& tw, const std::vector<Rat>& zList, int n) {
    const TensorOperator zero(tw.dim(), tw.sites());
    const TensorOperator one = TensorOperator::identity(tw.dim(), tw.sites());
    std::vector<std::vector<TensorOperator>> m(static_cast<std::size_t>(n));
    std::vector<std::vector<Rat>> vm(static_cast<std::size_t>(n));
    std::vector<TensorOperator> single;
    for (int j = 1; j <= n; ++j) single.push_back(w_operator(tw, zList, IndexSet{j}));
    for (int j = 1; j <= n; ++j)
        for (int k = 1; k <= n; ++k) {
            Rat zp = 1;
            for (int e = 0; e < n - k; ++e) zp *= zList.at(static_cast<std::size_t>(j - 1));
            vm[static_cast<std::size_t>(j - 1)].push_back(zp);
            m[static_cast<std::size_t>(j - 1)].push_back(single[static_cast<std::size_t>(j - 1)].shift(Rat(-2 * k + 2)) * PolyU(zp));
        }
    Rat vdet = laplace_det<Rat>(vm, Rat(0), Rat(1), [](const Rat& a, const Rat& b) { return Rat(a * b); });
    PolyU denom(vdet);
    const PolyU phi = phi_poly(tw);
    for (int k = 1; k < n; ++k) denom = denom * phi.shift(Rat(-2 * k));
    TensorOperator rhs = divide_by_scalar(operator_det(m, zero, one), denom);
    return w_operator(tw, zList, IndexSet::full(n)) - rhs;
}

TensorOperator check_br(const YoungDiagram& lambda, const Twist& tw) {
    const int n = lambda.height();
    if (n == 0) return TensorOperator(tw.dim(), tw.sites());
    const int top = lambda.row(0) + n;
    auto T = transfer_series(tw, top);
    const TensorOperator zero(tw.dim(), tw.sites());
    const TensorOperator one = TensorOperator::identity(tw.dim(), tw.sites());
    std::vector<std::vector<TensorOperator>> m(static_cast<std::size_t>(n), std::vector<TensorOperator>(static_cast<std::size_t>(n), zero));
    for (int j = 1; j <= n; ++j)
        for (int k = 1; k <= n; ++k) {
            int s = lambda.row(j - 1) + k - j;
            if (s >= 0) m[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)] = T[static_cast<std::size_t>(s)].shift(Rat(-2 * k + 2));
        }
    PolyU denom(1);
    const PolyU phi = phi_poly(tw);
    for (int k = 1; k < n; ++k) denom = denom * phi.shift(Rat(-2 * k));
    return transfer_matrix(lambda, tw) - divide_by_scalar(operator_det(m, zero, one), denom);
}

TensorOperator check_commutativity(const std::vector<WFactor>& pi, const std::vector<WFactor>& pi2, const Rat& v,
                                   const Twist& tw) {
    // (u_i + s + D) = (1/2)(u' - 2 theta_i + 2 s + 2 D) with u' = 2u
    Twist doubled = tw;
    for (auto& th : doubled.theta) th *= 2;
    TensorOperator a = scale_argument(coderivative_apply(WSpec{doubled, 0, pi}), Rat(2));
    TensorOperator b = scale_argument(coderivative_apply(WSpec{doubled, 2 * v, pi2}), Rat(2));
    return op_comm(a, b);
}

namespace {

using NilMatrix = std::vector<std::vector<NilJet>>;

NilJet nil_det(const NilMatrix& m, const JetShape& s) {
    return laplace_det<NilJet>(m, NilJet(s), NilJet::scalar(s, 1), [](const NilJet& a, const NilJet& b) { return a * b; });
}

NilMatrix nil_adjugate(const NilMatrix& m, const JetShape& s) {
    const std::size_t n = m.size();
    NilMatrix adj(n, std::vector<NilJet>(n, NilJet(s)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            NilMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                std::vector<NilJet> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != j) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            NilJet cof = nil_det(minor, s);
            adj[j][i] = ((i + j) % 2) ? -cof : cof;
        }
    return adj;
}

}  // namespace

TensorOperator check_removal(int m, int n, int j, const Twist& tw, const RatMatrix& omega) {
    if (tw.M != 0) throw ConfigError("check_removal: bosonic twists only");
    if (m < 0 || n < 1 || m + n != tw.sites()) throw ConfigError("check_removal: need m >= 0, n >= 1, m + n = N");
    if (j < 1 || j > tw.K) throw ConfigError("check_removal: j must be a bosonic index");
    const int d = tw.dim(), N = tw.sites();
    auto om_inv = rat_inverse(omega);
    if (!om_inv) throw ConfigError("check_removal: similarity matrix is singular");
    // g = omega^{-1} diag(xi) omega
    RatMatrix g(static_cast<std::size_t>(d), std::vector<Rat>(static_cast<std::size_t>(d), Rat(0)));
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                g[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += (*om_inv)[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] * tw.xi[static_cast<std::size_t>(c)] * omega[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
    const Rat xj = tw.eigenvalue(j);
    const JetShape s = tw.jet_shape();
    const Rat tprime = rat(1, 7) / (1 + abs(xj));   // generic point for the test function
    const auto prods = site_products(tw, 0);
    const std::uint32_t slot_bit = 1u << m;

    TensorOperator bop(d, N);
    const auto rows = all_rows(d, N);
    std::vector<std::vector<std::pair<int, std::pair<int, NilJet>>>> per_row(rows.size());
    parallel_for(rows.size(), [&](std::size_t r) {
        std::vector<int> outer(rows[r]), full(rows[r]);
        for (int i = m; i < N; ++i) outer[static_cast<std::size_t>(i)] = -1;
        full[static_cast<std::size_t>(m)] = -1;
        JetMatrix gout = perturbed_group(s, g, outer);
        JetMatrix gfull = perturbed_group(s, g, full);
        // eigenvalue jet by Newton iteration on det(lambda - G)
        NilJet lam = NilJet::scalar(s, xj);
        NilMatrix shifted(static_cast<std::size_t>(d), std::vector<NilJet>(static_cast<std::size_t>(d), NilJet(s)));
        NilMatrix adj;
        NilJet dp;
        for (int it = 0; it <= N + 1; ++it) {
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    shifted[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a == b ? lam : NilJet(s)) - gout[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            adj = nil_adjugate(shifted, s);
            dp = NilJet(s);
            for (int a = 0; a < d; ++a) dp += adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)];
            NilJet p = nil_det(shifted, s);
            if (p.is_zero()) break;
            lam -= p * dp.inverse();
        }
        // projector adj(lambda - G) / p'(lambda) at the converged eigenvalue
        NilJet scale = Rat(2) * lam * dp.inverse();
        NilJet f = jet_w(gfull, tw, tprime, Rat(0), 1, 0, 0).at(0);
        const int kslot = rows[r][static_cast<std::size_t>(m)];
        for (int c = 0; c < d; ++c)
            per_row[r].push_back({c, {kslot, scale * adj[static_cast<std::size_t>(kslot)][static_cast<std::size_t>(c)] * f}});
    });
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const int ri = bop.index(rows[r]);
        for (const auto& [c, entry] : per_row[r]) {
            const NilJet& jet = entry.second;
            std::vector<int> col(rows[r]);
            for (const auto& term : jet.terms()) {
                for (int i = 0; i < N; ++i) {
                    if (i == m) col[static_cast<std::size_t>(i)] = c;
                    else if ((term.levels >> i) & 1u) col[static_cast<std::size_t>(i)] = jet.pair_at(term.key, i).first;
                    else col[static_cast<std::size_t>(i)] = rows[r][static_cast<std::size_t>(i)];
                }
                Rat coef = term.c * Rat(1L << std::popcount(term.levels));
                bop.at(ri, bop.index(col)) += prods[term.levels | slot_bit] * coef;
            }
        }
    }
    // (1 - g/x_j)^{(x) N}
    TensorOperator left(d, N);
    for (int r = 0; r < left.size(); ++r) {
        auto rt = left.tuple(r);
        for (int c = 0; c < left.size(); ++c) {
            auto ct = left.tuple(c);
            Rat v = 1;
            for (int i = 0; i < N && !is_zero(v); ++i) {
                const std::size_t a = static_cast<std::size_t>(rt[static_cast<std::size_t>(i)]), b = static_cast<std::size_t>(ct[static_cast<std::size_t>(i)]);
                v *= (a == b ? Rat(1) : Rat(0)) - g[a][b] / xj;
            }
            if (!is_zero(v)) left.at(r, c) = PolyU(v);
        }
    }
    return op_mul(left, bop);
}

}  // namespace bf
