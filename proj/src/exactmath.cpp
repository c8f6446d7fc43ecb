#include "bethe_forge/exactmath.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <unordered_map>

namespace bf {

// ---------------------------------------------------------------- Rat

Rat rat(long p, long q) {
    if (q == 0) throw std::invalid_argument("rat: zero denominator");
    Rat r(p, q);
    r.canonicalize();
    return r;
}

Rat parse_rat(const std::string& s) {
    std::string t;
    for (char ch : s)
        if (ch != ' ') t.push_back(ch);
    if (t.empty()) throw ConfigError("empty rational");
    auto digits = [](const std::string& x, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && i < x.size() && (x[i] == '-' || x[i] == '+')) ++i;
        if (i == x.size()) return false;
        for (; i < x.size(); ++i)
            if (x[i] < '0' || x[i] > '9') return false;
        return true;
    };
    auto slash = t.find('/');
    std::string num = t.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
    if (!digits(num, true) || !digits(den, false)) throw ConfigError("malformed rational '" + s + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class n(num), d(den);
    if (d == 0) throw ConfigError("zero denominator in '" + s + "'");
    Rat r(n, d);
    r.canonicalize();
    return r;
}

std::string to_string(const Rat& r) { return r.get_str(); }

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = next(); while (x >= limit);
    return x % n;
}

Rat SplitMix64::small_positive_rat(int height) {
    long p = 1 + static_cast<long>(below(static_cast<std::uint64_t>(height)));
    long q = 1 + static_cast<long>(below(static_cast<std::uint64_t>(height)));
    return rat(p, q);
}

Rat SplitMix64::small_rat(int height) {
    Rat r = small_positive_rat(height);
    return (next() & 1u) ? Rat(-r) : r;
}

// ---------------------------------------------------------------- PolyU

PolyU::PolyU(const Rat& c) {
    if (!bf::is_zero(c)) c_.push_back(c);
}

PolyU::PolyU(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }

PolyU PolyU::u() { return PolyU(std::vector<Rat>{Rat(0), Rat(1)}); }

PolyU PolyU::linear(const Rat& c0, const Rat& c1) { return PolyU(std::vector<Rat>{c0, c1}); }

void PolyU::trim() {
    while (!c_.empty() && bf::is_zero(c_.back())) c_.pop_back();
}

Rat PolyU::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return Rat(0);
    return c_[static_cast<std::size_t>(i)];
}

PolyU PolyU::shift(const Rat& a) const {
    if (bf::is_zero(a) || c_.size() <= 1) return *this;
    const PolyU step = PolyU::linear(a, Rat(1));
    PolyU r;
    for (std::size_t k = c_.size(); k-- > 0;) r = r * step + PolyU(c_[k]);
    return r;
}

Rat PolyU::eval(const Rat& x) const {
    Rat acc(0);
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
    return acc;
}

PolyU PolyU::derivative() const {
    if (c_.size() <= 1) return PolyU();
    std::vector<Rat> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<long>(i);
    return PolyU(std::move(r));
}

std::string PolyU::str() const {
    if (c_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (bf::is_zero(c_[i])) continue;
        if (!out.empty()) out += " + ";
        out += to_string(c_[i]);
        if (i == 1) out += "*u";
        if (i > 1) out += "*u^" + std::to_string(i);
    }
    return out;
}

PolyU& PolyU::operator+=(const PolyU& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rat(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

PolyU& PolyU::operator-=(const PolyU& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rat(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

PolyU& PolyU::operator*=(const PolyU& o) { return *this = poly_mul(*this, o); }

PolyU& PolyU::operator*=(const Rat& s) {
    if (bf::is_zero(s)) {
        c_.clear();
        return *this;
    }
    for (auto& x : c_) x *= s;
    return *this;
}

PolyU PolyU::operator-() const {
    PolyU r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

PolyU operator*(const PolyU& a, const PolyU& b) { return poly_mul(a, b); }

PolyU poly_mul(const PolyU& p, const PolyU& q) {
    if (p.is_zero() || q.is_zero()) return PolyU();
    const auto& a = p.coeffs();
    const auto& b = q.coeffs();
    std::vector<Rat> r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_zero(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return PolyU(std::move(r));
}

std::pair<PolyU, PolyU> poly_divmod(const PolyU& a, const PolyU& b) {
    if (b.is_zero()) throw ExactDivisionFailed("poly_divmod: division by zero polynomial");
    std::vector<Rat> rem = a.coeffs();
    const auto& d = b.coeffs();
    const int db = b.degree();
    if (a.degree() < db) return {PolyU(), a};
    std::vector<Rat> quo(static_cast<std::size_t>(a.degree() - db + 1), Rat(0));
    for (int k = a.degree(); k >= db; --k) {
        const Rat& top = rem[static_cast<std::size_t>(k)];
        if (is_zero(top)) continue;
        Rat f = top / d.back();
        quo[static_cast<std::size_t>(k - db)] = f;
        for (int i = 0; i <= db; ++i) rem[static_cast<std::size_t>(k - db + i)] -= f * d[static_cast<std::size_t>(i)];
    }
    return {PolyU(std::move(quo)), PolyU(std::move(rem))};
}

PolyU poly_div_exact(const PolyU& a, const PolyU& b) {
    auto [q, r] = poly_divmod(a, b);
    if (!r.is_zero()) throw ExactDivisionFailed("inexact division: (" + a.str() + ") / (" + b.str() + ")");
    return q;
}

// ---------------------------------------------------------------- NilJet

namespace {

std::uint32_t key_base(const JetShape& s) { return static_cast<std::uint32_t>(s.dim * s.dim + 1); }

// sign of bringing the concatenation (x vars)(y vars) into ascending level order;
// only odd variables anticommute
int merge_sign(std::uint32_t odd_x, std::uint32_t odd_y) {
    int swaps = 0;
    while (odd_y) {
        int n = std::countr_zero(odd_y);
        odd_y &= odd_y - 1;
        swaps += std::popcount(odd_x >> (n + 1));
    }
    return (swaps & 1) ? -1 : 1;
}

}  // namespace

void NilJet::adopt(const JetShape& s) {
    if (shape_.dim == 0) shape_ = s;
}

NilJet NilJet::scalar(const JetShape& s, const Rat& c) {
    NilJet j(s);
    if (!bf::is_zero(c)) j.terms_.push_back(Term{0, 0, 0, c});
    return j;
}

NilJet NilJet::var(const JetShape& s, int level, int a, int b, const Rat& c) {
    if (level < 0 || level >= s.levels || a < 0 || b < 0 || a >= s.dim || b >= s.dim)
        throw std::out_of_range("NilJet::var: index out of range");
    NilJet j(s);
    if (bf::is_zero(c)) return j;
    std::uint32_t code = static_cast<std::uint32_t>(1 + a * s.dim + b);
    std::uint32_t key = code;
    for (int l = 0; l < level; ++l) key *= key_base(s);
    std::uint32_t bit = 1u << level;
    j.terms_.push_back(Term{key, bit, s.odd(a, b) ? bit : 0u, c});
    return j;
}

Rat NilJet::body() const {
    if (!terms_.empty() && terms_.front().key == 0) return terms_.front().c;
    return Rat(0);
}

Rat NilJet::coeff(std::uint32_t key) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                               [](const Term& t, std::uint32_t k) { return t.key < k; });
    if (it != terms_.end() && it->key == key) return it->c;
    return Rat(0);
}

std::pair<int, int> NilJet::pair_at(std::uint32_t key, int level) const {
    const std::uint32_t base = key_base(shape_);
    for (int l = 0; l < level; ++l) key /= base;
    std::uint32_t code = key % base;
    if (code == 0) return {-1, -1};
    int c = static_cast<int>(code) - 1;
    return {c / shape_.dim, c % shape_.dim};
}

std::uint32_t NilJet::encode(const std::vector<std::pair<int, int>>& pairs) const {
    const std::uint32_t base = key_base(shape_);
    std::uint32_t key = 0;
    for (std::size_t l = pairs.size(); l-- > 0;) {
        key *= base;
        if (pairs[l].first >= 0) key += static_cast<std::uint32_t>(1 + pairs[l].first * shape_.dim + pairs[l].second);
    }
    return key;
}

NilJet NilJet::from_map(const JetShape& s, std::vector<Term> v) {
    std::sort(v.begin(), v.end(), [](const Term& a, const Term& b) { return a.key < b.key; });
    NilJet j(s);
    j.terms_.reserve(v.size());
    for (auto& t : v) {
        if (!j.terms_.empty() && j.terms_.back().key == t.key) {
            j.terms_.back().c += t.c;
        } else {
            j.terms_.push_back(std::move(t));
        }
    }
    j.terms_.erase(std::remove_if(j.terms_.begin(), j.terms_.end(), [](const Term& t) { return bf::is_zero(t.c); }),
                   j.terms_.end());
    return j;
}

NilJet NilJet::filtered(const std::function<bool(const Term&)>& keep) const {
    NilJet j(shape_);
    for (const auto& t : terms_)
        if (keep(t)) j.terms_.push_back(t);
    return j;
}

NilJet NilJet::inverse() const {
    Rat b = body();
    if (bf::is_zero(b)) throw PoleHit("NilJet::inverse: jet has zero body");
    Rat binv = 1 / b;
    // 1/(b + n) = (1/b) sum_k (-n/b)^k, n nilpotent of order <= levels
    NilJet x = *this;
    x -= NilJet::scalar(shape_, b);
    x = (-binv) * x;
    NilJet acc = NilJet::scalar(shape_, Rat(1));
    NilJet pw = acc;
    for (int k = 0; k < shape_.levels && !pw.is_zero(); ++k) {
        pw = pw * x;
        acc += pw;
    }
    return binv * acc;
}

std::string NilJet::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) os << " + ";
        first = false;
        bool unit = (t.c == 1) && t.key != 0;
        if (!unit) os << to_string(t.c);
        bool need_star = !unit;
        for (int l = 0; l < shape_.levels; ++l) {
            auto [a, b] = pair_at(t.key, l);
            if (a < 0) continue;
            if (need_star) os << "*";
            os << "p" << (l + 1) << "[" << (a + 1) << "," << (b + 1) << "]";
            need_star = true;
        }
    }
    return os.str();
}

NilJet& NilJet::operator+=(const NilJet& o) {
    adopt(o.shape_);
    if (o.terms_.empty()) return *this;
    std::vector<Term> v = terms_;
    v.insert(v.end(), o.terms_.begin(), o.terms_.end());
    *this = from_map(shape_, std::move(v));
    return *this;
}

NilJet& NilJet::operator-=(const NilJet& o) { return *this += -o; }

NilJet NilJet::operator-() const {
    NilJet r = *this;
    for (auto& t : r.terms_) t.c = -t.c;
    return r;
}

NilJet operator*(const Rat& s, const NilJet& a) {
    if (bf::is_zero(s)) return NilJet(a.shape_);
    NilJet r = a;
    for (auto& t : r.terms_) t.c *= s;
    return r;
}

NilJet operator*(const NilJet& a, const NilJet& b) {
    JetShape s = a.shape_.dim ? a.shape_ : b.shape_;
    if (a.terms_.empty() || b.terms_.empty()) return NilJet(s);
    std::unordered_map<std::uint32_t, std::size_t> slot;
    std::vector<NilJet::Term> acc;
    slot.reserve(a.terms_.size() * b.terms_.size() / 2 + 1);
    for (const auto& x : a.terms_) {
        for (const auto& y : b.terms_) {
            if (x.levels & y.levels) continue;   // per-level nilpotency
            std::uint32_t key = x.key + y.key;
            auto [it, fresh] = slot.try_emplace(key, acc.size());
            if (fresh) acc.push_back(NilJet::Term{key, x.levels | y.levels, x.odd | y.odd, Rat(0)});
            NilJet::Term& t = acc[it->second];
            if (merge_sign(x.odd, y.odd) > 0)
                t.c += x.c * y.c;
            else
                t.c -= x.c * y.c;
        }
    }
    return NilJet::from_map(s, std::move(acc));
}

bool operator==(const NilJet& a, const NilJet& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].key != b.terms_[i].key || a.terms_[i].c != b.terms_[i].c) return false;
    return true;
}

NilJet niljet_mul(const NilJet& a, const NilJet& b) { return a * b; }

}  // namespace bf
