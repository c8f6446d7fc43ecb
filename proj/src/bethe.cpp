#include "bethe_forge/bethe.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "bethe_forge/characters.hpp"
#include "bethe_forge/parallel.hpp"

namespace bf {

namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

CMat constant_matrix(const TensorOperator& op) {
    CMat m(op.size(), op.size());
    for (int r = 0; r < op.size(); ++r)
        for (int c = 0; c < op.size(); ++c) m(r, c) = op.at(r, c).coeff(0).get_d();
    return m;
}

CMat matrix_at(const TensorOperator& op, const Rat& u) {
    CMat m(op.size(), op.size());
    for (int r = 0; r < op.size(); ++r)
        for (int c = 0; c < op.size(); ++c) m(r, c) = op.eval_entry(r, c, u).get_d();
    return m;
}

CVec to_eigen(const std::vector<cplx>& v) {
    CVec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

// unit norm, largest component real and positive
void fix_phase(CVec& v) {
    v.normalize();
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) best = i;
    v *= std::conj(v(best)) / std::abs(v(best));
}

std::vector<int> weight_of(const std::vector<int>& tuple, int dim) {
    std::vector<int> w(static_cast<std::size_t>(dim), 0);
    for (int k : tuple) ++w[static_cast<std::size_t>(k)];
    return w;
}

double max_abs(const CPoly& p) {
    double m = 0;
    for (const auto& c : p) m = std::max(m, std::abs(c));
    return m;
}

void trim(CPoly& p, double tol) {
    const double m = max_abs(p);
    while (p.size() > 1 && std::abs(p.back()) <= tol * m) p.pop_back();
}

double clean(double v, double scale) { return std::abs(v) <= 1e-13 * std::max(1.0, scale) ? 0.0 : v; }

}  // namespace

const TensorOperator& QStore::get(IndexSet I) {
    auto it = cache_.find(I.mask());
    if (it != cache_.end()) return it->second;
    return cache_.emplace(I.mask(), q_operator(I, tw_)).first->second;
}

cplx poly_eval(const CPoly& p, cplx u) {
    cplx acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * u + *it;
    return acc;
}

CPoly poly_shift(const CPoly& p, double a) {
    // Horner in polynomials: p(u + a)
    CPoly out;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        CPoly next(out.size() + 1, cplx(0));
        for (std::size_t k = 0; k < out.size(); ++k) {
            next[k + 1] += out[k];
            next[k] += a * out[k];
        }
        next[0] += *it;
        out = std::move(next);
    }
    if (out.empty()) out.push_back(0);
    return out;
}

CPoly poly_mul(const CPoly& a, const CPoly& b) {
    CPoly out(a.size() + b.size() - 1, cplx(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

CPoly poly_rem(const CPoly& a, const CPoly& b) {
    CPoly r = a;
    const std::size_t db = b.size() - 1;
    if (db == 0) return CPoly{cplx(0)};
    while (r.size() > db) {
        const cplx f = r.back() / b.back();
        const std::size_t off = r.size() - 1 - db;
        for (std::size_t k = 0; k <= db; ++k) r[off + k] -= f * b[k];
        r.pop_back();
    }
    return r;
}

std::vector<cplx> poly_roots(const CPoly& p) {
    const int n = static_cast<int>(p.size()) - 1;
    if (n <= 0) return {};
    CMat comp = CMat::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -p[static_cast<std::size_t>(i)] / p.back();
    Eigen::ComplexEigenSolver<CMat> es(comp, false);
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

Eigenbasis diagonalize_family(const Twist& tw, const std::vector<TensorOperator>& ops, const BetheOptions& opt) {
    tw.validate();
    const auto sectors = weight_sectors(tw.dim(), tw.sites());
    const int dimH = ops.empty() ? 1 : ops.front().size();
    std::vector<CMat> mats;
    for (const auto& op : ops) {
        CMat m = matrix_at(op, opt.u0);
        const double s = m.cwiseAbs().maxCoeff();
        if (s > 0) m /= s;
        mats.push_back(std::move(m));
    }
    std::vector<std::vector<CVec>> found(sectors.size());
    std::vector<int> attempts(sectors.size(), 0);
    std::vector<int> failed(sectors.size(), 0);
    parallel_for(sectors.size(), [&](std::size_t si) {
        const auto& idx = sectors[si];
        const int n = static_cast<int>(idx.size());
        std::vector<CMat> blocks;
        for (const auto& m : mats) {
            CMat b(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) b(r, c) = m(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
            blocks.push_back(std::move(b));
        }
        SplitMix64 rng(opt.seed * 0x9E3779B97F4A7C15ULL + si);
        for (int attempt = 0; attempt <= opt.retries; ++attempt) {
            attempts[si] = attempt + 1;
            CMat a = CMat::Zero(n, n);
            for (const auto& b : blocks) a += (0.5 + static_cast<double>(rng.below(1u << 20)) / (1u << 20)) * b;
            Eigen::ComplexEigenSolver<CMat> es(a);
            if (es.info() != Eigen::Success) continue;
            // order by eigenvalue so the basis does not depend on solver internals
            std::vector<int> order(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
            const auto& ev = es.eigenvalues();
            std::sort(order.begin(), order.end(), [&](int p, int q) {
                return ev(p).real() != ev(q).real() ? ev(p).real() < ev(q).real() : ev(p).imag() < ev(q).imag();
            });
            std::vector<CVec> vecs;
            CMat vmat(n, n);
            for (int k = 0; k < n; ++k) {
                CVec v = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
                fix_phase(v);
                vmat.col(k) = v;
                vecs.push_back(v);
            }
            Eigen::JacobiSVD<CMat> svd(vmat);
            if (svd.singularValues().minCoeff() < 1e-6) continue;
            bool ok = true;
            for (const auto& b : blocks)
                for (const auto& v : vecs) {
                    const cplx lam = v.dot(b * v);
                    if ((b * v - lam * v).norm() > opt.tol) ok = false;
                }
            if (!ok) continue;
            for (const auto& v : vecs) {
                CVec full = CVec::Zero(dimH);
                for (int r = 0; r < n; ++r) full(idx[static_cast<std::size_t>(r)]) = v(r);
                found[si].push_back(std::move(full));
            }
            return;
        }
        failed[si] = 1;
    });
    for (std::size_t si = 0; si < sectors.size(); ++si)
        if (failed[si])
            throw DegenerateSpectrum("diagonalize_family: no separating combination in sector " + std::to_string(si) + " after " +
                                     std::to_string(opt.retries) + " retries");
    Eigenbasis basis;
    TensorOperator shape(tw.dim(), tw.sites());
    for (std::size_t si = 0; si < sectors.size(); ++si) {
        basis.attempts = std::max(basis.attempts, attempts[si]);
        for (auto& v : found[si]) {
            EigenState st;
            st.id = static_cast<int>(basis.states.size());
            st.sector = static_cast<int>(si);
            st.weight = weight_of(shape.tuple(sectors[si].front()), tw.dim());
            st.vec.assign(v.data(), v.data() + v.size());
            basis.states.push_back(std::move(st));
        }
    }
    return basis;
}

CPoly eigenvalue_poly(const TensorOperator& op, const EigenState& state) {
    const CVec v = to_eigen(state.vec);
    const int deg = std::max(op.max_degree(), 0);
    CPoly out;
    for (int d = 0; d <= deg; ++d) out.push_back(v.dot(constant_matrix(op.coeff_matrix(d)) * v) / v.squaredNorm());
    return out;
}

std::vector<QFunction> q_functions(const TensorOperator& q, IndexSet I, const Twist& tw, const Eigenbasis& basis, double tol) {
    std::vector<CMat> coeff;
    for (int d = 0; d <= std::max(q.max_degree(), 0); ++d) coeff.push_back(constant_matrix(q.coeff_matrix(d)));
    std::vector<QFunction> out;
    for (const auto& st : basis.states) {
        const CVec v = to_eigen(st.vec);
        QFunction f;
        f.I = I;
        f.state = st.id;
        for (const auto& c : coeff) f.coeffs.push_back(v.dot(c * v));
        if (max_abs(f.coeffs) == 0) throw LeadingCoeffUnderflow("q_functions: Q_" + I.str() + " vanishes on state " + std::to_string(st.id));
        trim(f.coeffs, tol);
        f.degree = static_cast<int>(f.coeffs.size()) - 1;
        f.leading = f.coeffs.back();
        f.roots = poly_roots(f.coeffs);
        for (int j : I.elements()) f.expected_degree += st.weight[static_cast<std::size_t>(j - 1)];
        out.push_back(std::move(f));
    }
    (void)tw;
    return out;
}

std::vector<QFunction> q_functions(IndexSet I, const Twist& tw, const Eigenbasis& basis, double tol) {
    return q_functions(q_operator(I, tw), I, tw, basis, tol);
}

BaeForm bae_form(int i, int j, const Twist& tw) {
    const bool fi = tw.fermionic(i), fj = tw.fermionic(j);
    if (!fi && !fj) return BaeForm::BB;
    if (fi && fj) return BaeForm::FF;
    return fi ? BaeForm::FB : BaeForm::BF;
}

const char* bae_form_name(BaeForm f) {
    switch (f) {
        case BaeForm::BB: return "bb";
        case BaeForm::FF: return "ff";
        case BaeForm::BF: return "bf";
        case BaeForm::FB: return "fb";
    }
    return "?";
}

namespace {

struct LevelPolys {
    CPoly qI, qIi, qIij;
};

LevelPolys level_polys(QStore& qs, IndexSet I, int i, int j, const EigenState& st, double tol) {
    LevelPolys p{eigenvalue_poly(qs.get(I), st), eigenvalue_poly(qs.get(I.with(i)), st), eigenvalue_poly(qs.get(I.with(i).with(j)), st)};
    trim(p.qI, tol);
    trim(p.qIi, tol);
    trim(p.qIij, tol);
    return p;
}

}  // namespace

BaeReport check_bae(const NestingPath& path, QStore& qs, const Eigenbasis& basis, double tol) {
    const Twist& tw = qs.twist();
    BaeReport rep;
    for (int k = 1; k < path.length(); ++k) qs.get(path.level(k - 1)), qs.get(path.level(k)), qs.get(path.level(k + 1));
    for (const auto& st : basis.states)
        for (int k = 1; k < path.length(); ++k) {
            BaeEntry e;
            e.state = st.id;
            e.level = k;
            e.I = path.level(k - 1);
            e.i = path.added(k);
            e.j = path.added(k + 1);
            e.form = bae_form(e.i, e.j, tw);
            const LevelPolys p = level_polys(qs, e.I, e.i, e.j, st, tol);
            e.roots = poly_roots(p.qIi);
            const cplx xi = tw.eigenvalue(e.i).get_d(), xj = tw.eigenvalue(e.j).get_d();
            for (std::size_t a = 0; a < e.roots.size(); ++a)
                for (std::size_t b = a + 1; b < e.roots.size(); ++b)
                    if (std::abs(e.roots[a] - e.roots[b]) < tol) e.collision = true;
            if (e.collision) {
                e.pass = false;
                ++rep.flagged;
                rep.entries.push_back(std::move(e));
                continue;
            }
            std::vector<double> res_list;
            for (const cplx r : e.roots) {
                auto Q = [&](const CPoly& q, double s) { return poly_eval(q, r + s); };
                cplx num, den, target;
                switch (e.form) {
                    case BaeForm::BB:
                        num = xi * Q(p.qI, -2) * Q(p.qIi, 2) * Q(p.qIij, 0);
                        den = xj * Q(p.qI, 0) * Q(p.qIi, -2) * Q(p.qIij, 2);
                        target = -1;
                        break;
                    case BaeForm::FF:
                        num = xi * Q(p.qI, 2) * Q(p.qIi, -2) * Q(p.qIij, 0);
                        den = xj * Q(p.qI, 0) * Q(p.qIi, 2) * Q(p.qIij, -2);
                        target = -1;
                        break;
                    case BaeForm::BF:
                        num = xi * Q(p.qI, -2) * Q(p.qIij, 0);
                        den = xj * Q(p.qI, 0) * Q(p.qIij, -2);
                        target = 1;
                        break;
                    case BaeForm::FB:
                        num = xi * Q(p.qI, 2) * Q(p.qIij, 0);
                        den = xj * Q(p.qI, 0) * Q(p.qIij, 2);
                        target = 1;
                        break;
                }
                // a root sitting on a zero of the denominator is singular, not a failure
                if (std::abs(den) <= 1e-12 * std::max(1.0, std::abs(num))) {
                    e.collision = true;
                    break;
                }
                res_list.push_back(std::abs(num / den - target));
            }
            if (e.collision) {
                e.pass = false;
                ++rep.flagged;
                rep.entries.push_back(std::move(e));
                continue;
            }
            for (double res : res_list) {
                e.residuals.push_back(res);
                rep.max_residual = std::max(rep.max_residual, res);
                if (!(res < tol)) e.pass = false;
            }
            if (!e.pass) rep.all_pass = false;
            rep.entries.push_back(std::move(e));
        }
    return rep;
}

BaeReport check_bae(const NestingPath& path, const Twist& tw, const Eigenbasis& basis, double tol) {
    QStore qs(tw);
    return check_bae(path, qs, basis, tol);
}

DivisibilityReport check_op_divisibility(IndexSet I, int i, int j, QStore& qs, const Eigenbasis& basis, double tol) {
    const Twist& tw = qs.twist();
    if (i == j || I.contains(i) || I.contains(j)) throw ConfigError("check_op_divisibility: need distinct i, j outside I");
    DivisibilityReport rep;
    rep.I = I;
    rep.i = i;
    rep.j = j;
    rep.form = bae_form(i, j, tw);
    const double xi = tw.eigenvalue(i).get_d(), xj = tw.eigenvalue(j).get_d();
    for (const auto& st : basis.states) {
        const LevelPolys p = level_polys(qs, I, i, j, st, tol);
        auto S = [](const CPoly& q, double a) { return poly_shift(q, a); };
        auto add = [](CPoly a, const CPoly& b, cplx f) {
            if (a.size() < b.size()) a.resize(b.size(), cplx(0));
            for (std::size_t k = 0; k < b.size(); ++k) a[k] += f * b[k];
            return a;
        };
        CPoly combo;
        switch (rep.form) {
            case BaeForm::BB:
                combo = add(poly_mul(poly_mul(S(p.qI, -2), p.qIij), S(p.qIi, 2)), poly_mul(poly_mul(p.qI, S(p.qIij, 2)), S(p.qIi, -2)), xj / xi);
                break;
            case BaeForm::FF:
                combo = add(poly_mul(poly_mul(S(p.qIij, -2), p.qI), S(p.qIi, 2)), poly_mul(poly_mul(p.qIij, S(p.qI, 2)), S(p.qIi, -2)), xi / xj);
                break;
            case BaeForm::BF:
                combo = add(poly_mul(S(p.qI, -2), p.qIij), poly_mul(p.qI, S(p.qIij, -2)), -xj / xi);
                break;
            case BaeForm::FB:
                combo = add(poly_mul(p.qI, S(p.qIij, 2)), poly_mul(S(p.qI, 2), p.qIij), -xi / xj);
                break;
        }
        DivisibilityEntry e;
        e.state = st.id;
        const double scale = std::max(max_abs(combo), 1e-300);
        e.remainder = max_abs(poly_rem(combo, p.qIi)) / scale;
        e.pass = e.remainder < tol;
        if (!e.pass) rep.all_pass = false;
        rep.entries.push_back(e);
    }
    return rep;
}

DivisibilityReport check_op_divisibility(IndexSet I, int i, int j, const Twist& tw, const Eigenbasis& basis, double tol) {
    QStore qs(tw);
    return check_op_divisibility(I, i, j, qs, basis, tol);
}

cplx rebuilt_t1(const NestingPath& path, const Twist& tw, const std::map<std::uint32_t, CPoly>& q, cplx u) {
    auto Q = [&](IndexSet I, cplx at) { return poly_eval(q.at(I.mask()), at); };
    cplx sum = 0;
    for (int k = 1; k <= path.length(); ++k) {
        const int j = path.added(k);
        const double sg = tw.fermionic(j) ? -1.0 : 1.0;
        const IndexSet lo = path.level(k - 1), hi = path.level(k);
        sum += sg * tw.eigenvalue(j).get_d() * Q(lo, u - 2.0 * sg) * Q(hi, u + 2.0 * sg) / (Q(lo, u) * Q(hi, u));
    }
    return Q(path.level(path.length()), u) * sum;
}

namespace {

std::vector<cplx> sample_points(int n) {
    std::vector<cplx> pts;
    for (int k = 0; k <= n + 1; ++k) pts.emplace_back(0.3137 + 0.731 * k, 0.217 * (k % 3));
    return pts;
}

}  // namespace

ReconstructionReport check_reconstruction(const NestingPath& path, QStore& qs, const TensorOperator& t1,
                                          const Eigenbasis& basis, double tol) {
    const Twist& tw = qs.twist();
    ReconstructionReport rep;
    for (const auto& st : basis.states) {
        std::map<std::uint32_t, CPoly> q;
        for (int k = 0; k <= path.length(); ++k) q[path.level(k).mask()] = eigenvalue_poly(qs.get(path.level(k)), st);
        const CPoly t = eigenvalue_poly(t1, st);
        const double scale = std::max(max_abs(t), 1.0);
        double worst = 0;
        for (cplx u : sample_points(tw.sites())) worst = std::max(worst, std::abs(rebuilt_t1(path, tw, q, u) - poly_eval(t, u)) / scale);
        rep.rel_error.push_back(worst);
        rep.max_rel_error = std::max(rep.max_rel_error, worst);
        if (!(worst < tol)) rep.all_pass = false;
    }
    return rep;
}

bool SpectrumReport::ok() const {
    bool good = path_independent && degree_law;
    for (const auto& b : bae) good = good && b.all_pass;
    for (const auto& r : rec) good = good && r.all_pass;
    return good;
}

SpectrumReport run_spectrum(const Twist& tw, const std::vector<NestingPath>& paths, const BetheOptions& opt) {
    tw.validate();
    for (const auto& p : paths)
        if (p.length() != tw.dim()) throw ConfigError("spectrum: path length must equal K + M");
    SpectrumReport rep;
    rep.tw = tw;
    rep.paths = paths;
    rep.opt = opt;
    const int n = tw.dim();
    const std::size_t count = std::size_t{1} << n;
    std::vector<TensorOperator> qs_list(count);
    parallel_for(count, [&](std::size_t m) { qs_list[m] = q_operator(IndexSet(static_cast<std::uint32_t>(m)), tw); });
    const TensorOperator t1 = transfer_matrix(YoungDiagram{1}, tw);
    std::vector<TensorOperator> family = qs_list;
    family.push_back(t1);
    rep.basis = diagonalize_family(tw, family, opt);
    QStore store(tw);
    for (std::size_t m = 0; m < count; ++m) {
        rep.q.push_back(q_functions(qs_list[m], IndexSet(static_cast<std::uint32_t>(m)), tw, rep.basis, opt.tol));
        for (const auto& f : rep.q.back())
            if (f.degree != f.expected_degree) rep.degree_law = false;
        store.get(IndexSet(static_cast<std::uint32_t>(m)));
    }
    for (const auto& p : paths) {
        rep.bae.push_back(check_bae(p, store, rep.basis, opt.tol));
        rep.rec.push_back(check_reconstruction(p, store, t1, rep.basis, 1e-8));
    }
    // rebuilt T^1 must not depend on the path
    for (const auto& st : rep.basis.states) {
        std::map<std::uint32_t, CPoly> q;
        for (std::size_t m = 0; m < count; ++m) q[static_cast<std::uint32_t>(m)] = rep.q[m][static_cast<std::size_t>(st.id)].coeffs;
        const double scale = std::max(max_abs(eigenvalue_poly(t1, st)), 1.0);
        for (cplx u : sample_points(tw.sites())) {
            const cplx ref = rebuilt_t1(paths.front(), tw, q, u);
            for (const auto& p : paths) rep.path_spread = std::max(rep.path_spread, std::abs(rebuilt_t1(p, tw, q, u) - ref) / scale);
        }
    }
    rep.path_independent = rep.path_spread < 1e-8;
    return rep;
}

namespace {

nlohmann::ordered_json cjson(cplx z, double scale) { return nlohmann::ordered_json::array({clean(z.real(), scale), clean(z.imag(), scale)}); }

}  // namespace

nlohmann::ordered_json spectrum_json(const SpectrumReport& r) {
    using J = nlohmann::ordered_json;
    J out;
    out["K"] = r.tw.K;
    out["M"] = r.tw.M;
    out["N"] = r.tw.sites();
    J xs = J::array(), th = J::array();
    for (const auto& x : r.tw.xi) xs.push_back(x.get_str());
    for (const auto& t : r.tw.theta) th.push_back(t.get_str());
    out["x"] = xs;
    out["theta"] = th;
    out["u0"] = r.opt.u0.get_str();
    out["tol"] = r.opt.tol;
    out["seed"] = r.opt.seed;
    J paths = J::array();
    for (const auto& p : r.paths) paths.push_back(p.str());
    out["paths"] = paths;
    J states = J::array();
    for (const auto& st : r.basis.states) {
        J s;
        s["id"] = st.id;
        s["sector"] = st.sector;
        s["weight"] = st.weight;
        J qs = J::array();
        for (const auto& per : r.q) {
            const QFunction& f = per[static_cast<std::size_t>(st.id)];
            const double scale = max_abs(f.coeffs);
            J q;
            q["I"] = f.I.str();
            q["degree"] = f.degree;
            J c = J::array(), rt = J::array();
            for (const auto& z : f.coeffs) c.push_back(cjson(z, scale));
            for (const auto& z : f.roots) rt.push_back(cjson(z, 1.0));
            q["coeffs"] = c;
            q["roots"] = rt;
            qs.push_back(q);
        }
        s["q"] = qs;
        J bae = J::array();
        for (std::size_t pi = 0; pi < r.bae.size(); ++pi)
            for (const auto& e : r.bae[pi].entries) {
                if (e.state != st.id) continue;
                J b;
                b["path"] = r.paths[pi].str();
                b["level"] = e.level;
                b["I"] = e.I.str();
                b["i"] = e.i;
                b["j"] = e.j;
                b["form"] = bae_form_name(e.form);
                b["residuals"] = e.residuals;
                b["collision"] = e.collision;
                b["pass"] = e.pass;
                bae.push_back(b);
            }
        s["bae"] = bae;
        J rec = J::array();
        for (const auto& rr : r.rec) rec.push_back(rr.rel_error[static_cast<std::size_t>(st.id)]);
        s["t1_rel_error"] = rec;
        states.push_back(s);
    }
    out["states"] = states;
    J sum;
    double bae_max = 0, rec_max = 0;
    bool bae_ok = true, rec_ok = true;
    int flagged = 0;
    for (const auto& b : r.bae) bae_max = std::max(bae_max, b.max_residual), bae_ok = bae_ok && b.all_pass, flagged += b.flagged;
    for (const auto& rr : r.rec) rec_max = std::max(rec_max, rr.max_rel_error), rec_ok = rec_ok && rr.all_pass;
    sum["states"] = static_cast<int>(r.basis.states.size());
    sum["bae_pass"] = bae_ok;
    sum["bae_max_residual"] = bae_max;
    sum["flagged"] = flagged;
    sum["t1_pass"] = rec_ok;
    sum["t1_max_rel_error"] = rec_max;
    sum["path_independent"] = r.path_independent;
    sum["degree_law"] = r.degree_law;
    sum["ok"] = r.ok();
    out["summary"] = sum;
    return out;
}

std::string roots_csv(const SpectrumReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "state,I,k,re,im\n";
    for (const auto& st : r.basis.states)
        for (const auto& per : r.q) {
            const QFunction& f = per[static_cast<std::size_t>(st.id)];
            for (std::size_t k = 0; k < f.roots.size(); ++k)
                os << st.id << ',' << f.I.str() << ',' << k + 1 << ',' << clean(f.roots[k].real(), 1.0) << ','
                   << clean(f.roots[k].imag(), 1.0) << '\n';
        }
    return os.str();
}

}  // namespace bf
