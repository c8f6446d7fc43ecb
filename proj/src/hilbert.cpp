#include "bethe_forge/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <map>

namespace bf {

// ---------------------------------------------------------------- Twist

std::uint32_t Twist::fermion_mask() const {
    std::uint32_t m = 0;
    for (int a = K; a < K + M; ++a) m |= 1u << a;
    return m;
}

JetShape Twist::jet_shape() const { return JetShape{sites(), dim(), fermion_mask()}; }

void Twist::validate() const {
    if (K < 1) throw ConfigError("K must be positive");
    if (M < 0) throw ConfigError("M must be nonnegative");
    if (static_cast<int>(xi.size()) != K + M)
        throw ConfigError("expected " + std::to_string(K + M) + " eigenvalues, got " + std::to_string(xi.size()));
    if (theta.empty()) throw ConfigError("at least one site is required");
    for (std::size_t a = 0; a < xi.size(); ++a) {
        if (is_zero(xi[a])) throw ConfigError("eigenvalues must be nonzero");
        for (std::size_t b = 0; b < a; ++b)
            if (xi[a] == xi[b]) throw ConfigError("eigenvalues must be pairwise distinct");
    }
}

Twist make_twist(int K, int M, std::vector<Rat> xi, std::vector<Rat> theta) {
    Twist t{K, M, std::move(xi), std::move(theta)};
    t.validate();
    return t;
}

// ---------------------------------------------------------------- IndexSet

IndexSet::IndexSet(std::initializer_list<int> elems) {
    for (int j : elems) mask_ |= 1u << (j - 1);
}

IndexSet IndexSet::parse(const std::string& digits) {
    std::uint32_t m = 0;
    for (char ch : digits) {
        if (ch == '{' || ch == '}' || ch == ' ') continue;
        if (ch < '1' || ch > '9') throw ConfigError("bad index set '" + digits + "'");
        m |= 1u << (ch - '1');
    }
    return IndexSet(m);
}

int IndexSet::size() const { return std::popcount(mask_); }

std::vector<int> IndexSet::elements() const {
    std::vector<int> v;
    for (int j = 1; j <= 32; ++j)
        if (contains(j)) v.push_back(j);
    return v;
}

std::string IndexSet::str() const {
    if (mask_ == 0) return "{}";
    std::string s;
    for (int j : elements()) s += std::to_string(j);
    return s;
}

// ---------------------------------------------------------------- NestingPath

NestingPath::NestingPath(std::vector<IndexSet> descending) {
    if (descending.empty() || descending.back().size() != 0) throw ConfigError("nesting path must end at {}");
    sets_.assign(descending.rbegin(), descending.rend());
    for (std::size_t k = 0; k < sets_.size(); ++k) {
        if (sets_[k].size() != static_cast<int>(k)) throw ConfigError("nesting path must drop one index per step");
        if (k > 0 && (sets_[k - 1].mask() & ~sets_[k].mask()) != 0) throw ConfigError("nesting path is not a chain");
    }
}

NestingPath NestingPath::from_order(const std::vector<int>& added) {
    std::vector<IndexSet> asc{IndexSet()};
    for (int j : added) asc.push_back(asc.back().with(j));
    return NestingPath(std::vector<IndexSet>(asc.rbegin(), asc.rend()));
}

NestingPath NestingPath::parse(const std::string& text, int n) {
    std::vector<IndexSet> desc;
    std::string cur;
    for (char ch : text) {
        if (ch == '>') {
            desc.push_back(IndexSet::parse(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    desc.push_back(IndexSet::parse(cur));
    if (desc.front() != IndexSet::full(n)) throw ConfigError("nesting path must start at the full set");
    return NestingPath(desc);
}

int NestingPath::added(int k) const {
    std::uint32_t diff = level(k).mask() & ~level(k - 1).mask();
    return std::countr_zero(diff) + 1;
}

std::string NestingPath::str() const {
    std::string s;
    for (int k = length(); k >= 0; --k) {
        if (k > 0) {
            s += level(k).str() + ">";
        }
    }
    return s;
}

// ---------------------------------------------------------------- TensorOperator

TensorOperator::TensorOperator(int dim, int sites) : d_(dim), n_(sites) {
    size_ = 1;
    for (int i = 0; i < sites; ++i) size_ *= dim;
    e_.assign(static_cast<std::size_t>(size_) * static_cast<std::size_t>(size_), PolyU());
}

TensorOperator TensorOperator::identity(int dim, int sites, const PolyU& scale) {
    TensorOperator r(dim, sites);
    for (int i = 0; i < r.size_; ++i) r.at(i, i) = scale;
    return r;
}

std::vector<int> TensorOperator::tuple(int index) const {
    std::vector<int> t(static_cast<std::size_t>(n_));
    for (int i = n_; i-- > 0;) {
        t[static_cast<std::size_t>(i)] = index % d_;
        index /= d_;
    }
    return t;
}

int TensorOperator::index(const std::vector<int>& t) const {
    int idx = 0;
    for (int k : t) idx = idx * d_ + k;
    return idx;
}

bool TensorOperator::is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](const PolyU& p) { return p.is_zero(); });
}

int TensorOperator::max_degree() const {
    int d = -1;
    for (const auto& p : e_) d = std::max(d, p.degree());
    return d;
}

TensorOperator TensorOperator::shift(const Rat& a) const {
    TensorOperator r = *this;
    for (auto& p : r.e_) p = p.shift(a);
    return r;
}

TensorOperator TensorOperator::coeff_matrix(int k) const {
    TensorOperator r(d_, n_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = PolyU(e_[i].coeff(k));
    return r;
}

std::string TensorOperator::max_residual() const {
    const PolyU* best = nullptr;
    for (const auto& p : e_)
        if (!p.is_zero() && (!best || p.degree() > best->degree())) best = &p;
    return best ? best->str() : "0";
}

bool TensorOperator::respects_sectors() const {
    for (int r = 0; r < size_; ++r) {
        auto tr = tuple(r);
        std::sort(tr.begin(), tr.end());
        for (int c = 0; c < size_; ++c) {
            if (at(r, c).is_zero()) continue;
            auto tc = tuple(c);
            std::sort(tc.begin(), tc.end());
            if (tr != tc) return false;
        }
    }
    return true;
}

TensorOperator& TensorOperator::operator+=(const TensorOperator& o) {
    if (o.size_ != size_ || o.d_ != d_) throw DimMismatch("operator sum: dimension mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
}

TensorOperator& TensorOperator::operator-=(const TensorOperator& o) {
    if (o.size_ != size_ || o.d_ != d_) throw DimMismatch("operator difference: dimension mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
    return *this;
}

TensorOperator& TensorOperator::operator*=(const PolyU& s) {
    for (auto& p : e_) p = p * s;
    return *this;
}

bool operator==(const TensorOperator& a, const TensorOperator& b) {
    return a.d_ == b.d_ && a.n_ == b.n_ && a.e_ == b.e_;
}

TensorOperator op_mul(const TensorOperator& a, const TensorOperator& b) {
    if (a.size() != b.size() || a.local_dim() != b.local_dim())
        throw DimMismatch("op_mul: dimension mismatch");
    const int n = a.size();
    TensorOperator r(a.local_dim(), a.sites());
    std::vector<int> nz;
    for (int i = 0; i < n; ++i) {
        nz.clear();
        for (int k = 0; k < n; ++k)
            if (!a.at(i, k).is_zero()) nz.push_back(k);
        if (nz.empty()) continue;
        for (int j = 0; j < n; ++j) {
            PolyU acc;
            for (int k : nz) {
                const PolyU& y = b.at(k, j);
                if (!y.is_zero()) acc += a.at(i, k) * y;
            }
            r.at(i, j) = std::move(acc);
        }
    }
    return r;
}

TensorOperator op_comm(const TensorOperator& a, const TensorOperator& b) { return op_mul(a, b) - op_mul(b, a); }

namespace {

// Fraction-free Gauss-Jordan on [B | A]; leaves det(B) * B^{-1} A on the right.
std::vector<std::vector<PolyU>> bareiss_solve(std::vector<std::vector<PolyU>> m, int n, PolyU& det_out) {
    const int cols = static_cast<int>(m.front().size());
    PolyU prev(1);
    int sign = 1;
    for (int k = 0; k < n; ++k) {
        int p = k;
        while (p < n && m[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)].is_zero()) ++p;
        if (p == n) throw ExactDivisionFailed("op_left_divide: singular divisor block");
        if (p != k) {
            std::swap(m[static_cast<std::size_t>(p)], m[static_cast<std::size_t>(k)]);
            sign = -sign;
        }
        const PolyU piv = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            auto& row = m[static_cast<std::size_t>(i)];
            const PolyU f = row[static_cast<std::size_t>(k)];
            for (int j = 0; j < cols; ++j) {
                if (j == k) continue;
                PolyU v = piv * row[static_cast<std::size_t>(j)] - f * m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                row[static_cast<std::size_t>(j)] = poly_div_exact(v, prev);
            }
            row[static_cast<std::size_t>(k)] = PolyU();
        }
        prev = piv;
    }
    det_out = prev * Rat(sign);
    return m;
}

}  // namespace

TensorOperator op_left_divide(const TensorOperator& b, const TensorOperator& a) {
    if (a.size() != b.size() || a.local_dim() != b.local_dim())
        throw DimMismatch("op_left_divide: dimension mismatch");
    TensorOperator x(a.local_dim(), a.sites());
    for (const auto& sec : weight_sectors(a.local_dim(), a.sites())) {
        const int n = static_cast<int>(sec.size());
        std::vector<std::vector<PolyU>> m(static_cast<std::size_t>(n), std::vector<PolyU>(static_cast<std::size_t>(2 * n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = b.at(sec[static_cast<std::size_t>(i)], sec[static_cast<std::size_t>(j)]);
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + j)] = a.at(sec[static_cast<std::size_t>(i)], sec[static_cast<std::size_t>(j)]);
            }
        PolyU det;
        auto red = bareiss_solve(std::move(m), n, det);
        // after elimination every diagonal entry equals the last pivot
        const PolyU& diag = red[0][0];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                x.at(sec[static_cast<std::size_t>(i)], sec[static_cast<std::size_t>(j)]) =
                    poly_div_exact(red[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + j)], diag);
    }
    return x;
}

TensorOperator perm_op(int dim, int sites, int i, int j, bool graded, std::uint32_t fermions) {
    if (i < 1 || j > sites || i >= j) throw BadSite("perm_op: need 1 <= i < j <= N");
    TensorOperator p(dim, sites);
    for (int c = 0; c < p.size(); ++c) {
        auto t = p.tuple(c);
        const int a = t[static_cast<std::size_t>(i - 1)];
        const int b = t[static_cast<std::size_t>(j - 1)];
        int sign = 1;
        if (graded) {
            auto par = [&](int k) { return static_cast<int>((fermions >> k) & 1u); };
            int between = 0;
            for (int s = i; s < j - 1; ++s) between += par(t[static_cast<std::size_t>(s)]);
            int e = par(a) * par(b) + (par(a) + par(b)) * between;
            if (e & 1) sign = -1;
        }
        std::swap(t[static_cast<std::size_t>(i - 1)], t[static_cast<std::size_t>(j - 1)]);
        p.at(p.index(t), c) = PolyU(Rat(sign));
    }
    return p;
}

std::vector<std::vector<int>> weight_sectors(int dim, int sites) {
    int size = 1;
    for (int i = 0; i < sites; ++i) size *= dim;
    std::map<std::vector<int>, std::size_t> where;
    std::vector<std::vector<int>> out;
    for (int idx = 0; idx < size; ++idx) {
        std::vector<int> t(static_cast<std::size_t>(sites));
        int r = idx;
        for (int s = sites; s-- > 0;) {
            t[static_cast<std::size_t>(s)] = r % dim;
            r /= dim;
        }
        std::sort(t.begin(), t.end());
        auto [it, fresh] = where.try_emplace(t, out.size());
        if (fresh) out.emplace_back();
        out[it->second].push_back(idx);
    }
    return out;
}

nlohmann::json to_json(const TensorOperator& op) {
    nlohmann::json entries = nlohmann::json::array();
    for (int r = 0; r < op.size(); ++r)
        for (int c = 0; c < op.size(); ++c)
            if (!op.at(r, c).is_zero()) entries.push_back({r, c, op.at(r, c).str()});
    return {{"dim", op.size()}, {"basis", "lex"}, {"entries", entries}};
}

}  // namespace bf
