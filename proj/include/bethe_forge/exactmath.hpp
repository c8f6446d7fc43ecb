#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonvanishingPole : Error { using Error::Error; };
struct ExactDivisionFailed : Error { using Error::Error; };
struct PoleHit : Error { using Error::Error; };
struct DimMismatch : Error { using Error::Error; };
struct BadSite : Error { using Error::Error; };
struct DegreeOverflow : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// ---------------------------------------------------------------- Rat

using Rat = mpq_class;

Rat rat(long p, long q = 1);
Rat parse_rat(const std::string& s);   // "p/q", "p", "-p/q"
std::string to_string(const Rat& r);   // canonical "p/q" or "p"
inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

// splitmix64; fixed algorithm so draws agree across platforms
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next();
    std::uint64_t below(std::uint64_t n);   // uniform in [0, n)
    Rat small_rat(int height = 13);          // p/q with 1 <= |p|, q <= height
    Rat small_positive_rat(int height = 13);
private:
    std::uint64_t s_;
};

// ---------------------------------------------------------------- PolyU

// Univariate polynomial in the spectral parameter u, lowest degree first.
class PolyU {
public:
    PolyU() = default;
    PolyU(const Rat& c);                          // NOLINT: constant
    PolyU(long c) : PolyU(Rat(c)) {}              // NOLINT
    explicit PolyU(std::vector<Rat> coeffs);
    static PolyU u();                             // the monomial u
    static PolyU linear(const Rat& c0, const Rat& c1);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Rat>& coeffs() const { return c_; }
    Rat coeff(int i) const;
    const Rat& lead() const { return c_.back(); }

    PolyU shift(const Rat& a) const;   // p(u + a)
    Rat eval(const Rat& x) const;
    PolyU derivative() const;
    std::string str() const;           // "c0 + c1*u + c2*u^2"

    PolyU& operator+=(const PolyU& o);
    PolyU& operator-=(const PolyU& o);
    PolyU& operator*=(const PolyU& o);
    PolyU& operator*=(const Rat& s);
    PolyU operator-() const;

    friend PolyU operator+(PolyU a, const PolyU& b) { return a += b; }
    friend PolyU operator-(PolyU a, const PolyU& b) { return a -= b; }
    friend PolyU operator*(const PolyU& a, const PolyU& b);
    friend PolyU operator*(PolyU a, const Rat& s) { return a *= s; }
    friend PolyU operator*(const Rat& s, PolyU a) { return a *= s; }
    friend bool operator==(const PolyU& a, const PolyU& b) { return a.c_ == b.c_; }
    friend bool operator!=(const PolyU& a, const PolyU& b) { return !(a == b); }

private:
    void trim();
    std::vector<Rat> c_;
};

inline bool is_zero(const PolyU& p) { return p.is_zero(); }
PolyU poly_mul(const PolyU& p, const PolyU& q);
std::pair<PolyU, PolyU> poly_divmod(const PolyU& a, const PolyU& b);
PolyU poly_div_exact(const PolyU& a, const PolyU& b);   // throws ExactDivisionFailed

// ---------------------------------------------------------------- LaurentJet

// Truncated Laurent expansion in a small parameter eps with a fixed window
// [lo, hi]; products drop orders outside the window.
template <class T>
class LaurentJet {
public:
    LaurentJet(int lo, int hi, const T& zero = T{})
        : lo_(lo), hi_(hi), zero_(zero), c_(static_cast<std::size_t>(hi - lo + 1), zero) {
        if (hi < lo) throw std::invalid_argument("LaurentJet: empty window");
    }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    bool in_window(int k) const { return k >= lo_ && k <= hi_; }
    const T& at(int k) const {
        if (!in_window(k)) return zero_;
        return c_[static_cast<std::size_t>(k - lo_)];
    }
    T& at(int k) {
        if (!in_window(k)) throw std::out_of_range("LaurentJet: order outside window");
        return c_[static_cast<std::size_t>(k - lo_)];
    }
    const T& zero() const { return zero_; }

    LaurentJet& operator+=(const LaurentJet& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = c_[i] + o.c_[i];
        return *this;
    }
    LaurentJet& operator-=(const LaurentJet& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = c_[i] - o.c_[i];
        return *this;
    }
    friend LaurentJet operator+(LaurentJet a, const LaurentJet& b) { return a += b; }
    friend LaurentJet operator-(LaurentJet a, const LaurentJet& b) { return a -= b; }
    friend LaurentJet operator*(const LaurentJet& a, const LaurentJet& b) {
        a.check(b);
        LaurentJet r(a.lo_, a.hi_, a.zero_);
        for (int i = a.lo_; i <= a.hi_; ++i) {
            const T& x = a.at(i);
            if (is_zero(x)) continue;
            for (int j = b.lo_; j <= b.hi_; ++j) {
                if (!r.in_window(i + j)) continue;
                const T& y = b.at(j);
                if (is_zero(y)) continue;
                r.at(i + j) = r.at(i + j) + x * y;
            }
        }
        return r;
    }
    friend LaurentJet operator*(const Rat& s, LaurentJet a) {
        for (auto& x : a.c_) x = s * x;
        return a;
    }
    // multiply by eps^k, dropping what leaves the window
    LaurentJet shifted(int k) const {
        LaurentJet r(lo_, hi_, zero_);
        for (int i = lo_; i <= hi_; ++i)
            if (r.in_window(i + k)) r.at(i + k) = at(i);
        return r;
    }
    LaurentJet with_window(int lo, int hi) const {
        LaurentJet r(lo, hi, zero_);
        for (int i = std::max(lo, lo_); i <= std::min(hi, hi_); ++i) r.at(i) = at(i);
        return r;
    }

private:
    void check(const LaurentJet& o) const {
        if (o.lo_ != lo_ || o.hi_ != hi_) throw std::invalid_argument("LaurentJet: window mismatch");
    }
    int lo_, hi_;
    T zero_;
    std::vector<T> c_;
};

template <class T>
bool is_zero(const LaurentJet<T>& j) {
    for (int k = j.lo(); k <= j.hi(); ++k)
        if (!is_zero(j.at(k))) return false;
    return true;
}

template <class T>
T laurent_limit(const LaurentJet<T>& j) {
    for (int k = j.lo(); k < 0 && k <= j.hi(); ++k)
        if (!is_zero(j.at(k)))
            throw NonvanishingPole("laurent_limit: nonzero coefficient at order " + std::to_string(k));
    return j.at(0);
}

// ---------------------------------------------------------------- NilJet

// Shape shared by all jets of one computation: N perturbation levels, each
// carrying a (dim x dim) matrix index pair. Variables with index pair (a,b)
// are Grassmann-odd when exactly one of a,b is fermionic.
struct JetShape {
    int levels = 0;
    int dim = 0;
    std::uint32_t fermions = 0;   // bit a set when index a (0-based) is odd

    bool odd(int a, int b) const { return (((fermions >> a) ^ (fermions >> b)) & 1u) != 0; }
    friend bool operator==(const JetShape& x, const JetShape& y) {
        return x.levels == y.levels && x.dim == y.dim && x.fermions == y.fermions;
    }
};

class NilJet {
public:
    struct Term {
        std::uint32_t key = 0;     // base (dim^2+1) digits, one per level; 0 = absent
        std::uint32_t levels = 0;  // bitmask of present levels
        std::uint32_t odd = 0;     // bitmask of levels holding odd variables
        Rat c;
    };

    NilJet() = default;
    explicit NilJet(const JetShape& s) : shape_(s) {}
    static NilJet scalar(const JetShape& s, const Rat& c);
    // single variable phi_level[a,b], 0-based level and indices
    static NilJet var(const JetShape& s, int level, int a, int b, const Rat& c = Rat(1));

    const JetShape& shape() const { return shape_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Rat body() const;
    Rat coeff(std::uint32_t key) const;

    // (a,b) pair at a level of a key, or (-1,-1) if absent
    std::pair<int, int> pair_at(std::uint32_t key, int level) const;
    std::uint32_t encode(const std::vector<std::pair<int, int>>& pairs) const;   // per level, (-1,-1) absent

    NilJet filtered(const std::function<bool(const Term&)>& keep) const;
    NilJet inverse() const;   // jet units only (nonzero body)
    std::string str() const;  // "1 + 2*p1[1,2]*p2[2,1]" with 1-based labels

    NilJet& operator+=(const NilJet& o);
    NilJet& operator-=(const NilJet& o);
    NilJet operator-() const;
    friend NilJet operator+(NilJet a, const NilJet& b) { return a += b; }
    friend NilJet operator-(NilJet a, const NilJet& b) { return a -= b; }
    friend NilJet operator*(const NilJet& a, const NilJet& b);
    friend NilJet operator*(const Rat& s, const NilJet& a);
    friend NilJet operator*(const NilJet& a, const Rat& s) { return s * a; }
    friend bool operator==(const NilJet& a, const NilJet& b);

private:
    static NilJet from_map(const JetShape& s, std::vector<Term> unsorted);
    void adopt(const JetShape& s);
    JetShape shape_;
    std::vector<Term> terms_;   // sorted by key, no zero coefficients
};

inline bool is_zero(const NilJet& j) { return j.is_zero(); }
NilJet niljet_mul(const NilJet& a, const NilJet& b);

}  // namespace bf
