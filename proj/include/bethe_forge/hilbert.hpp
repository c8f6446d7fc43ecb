#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bethe_forge/exactmath.hpp"
#include "json.hpp"

namespace bf {

// Diagonal twist g = diag(x_1..x_K, y_1..y_M) plus inhomogeneities.
// Eigenvalue indices are 1-based everywhere in the public API.
struct Twist {
    int K = 0;
    int M = 0;
    std::vector<Rat> xi;      // x_1..x_K then y_1..y_M
    std::vector<Rat> theta;   // one per site

    int dim() const { return K + M; }
    int sites() const { return static_cast<int>(theta.size()); }
    bool fermionic(int j) const { return j > K; }            // 1-based
    int grading(int j) const { return fermionic(j) ? 1 : 0;  }
    const Rat& eigenvalue(int j) const { return xi.at(static_cast<std::size_t>(j - 1)); }
    std::uint32_t fermion_mask() const;                      // 0-based bits
    JetShape jet_shape() const;
    void validate() const;   // throws ConfigError
};

Twist make_twist(int K, int M, std::vector<Rat> xi, std::vector<Rat> theta);

// Sorted duplicate-free subset of {1..K+M}, stored as a bitmask (bit j-1).
class IndexSet {
public:
    IndexSet() = default;
    explicit IndexSet(std::uint32_t mask) : mask_(mask) {}
    IndexSet(std::initializer_list<int> elems);
    static IndexSet full(int n) { return IndexSet(n >= 32 ? ~0u : ((1u << n) - 1u)); }
    static IndexSet parse(const std::string& digits);   // "123", "" = empty

    std::uint32_t mask() const { return mask_; }
    int size() const;
    bool contains(int j) const { return (mask_ >> (j - 1)) & 1u; }
    std::vector<int> elements() const;
    IndexSet with(int j) const { return IndexSet(mask_ | (1u << (j - 1))); }
    IndexSet without(int j) const { return IndexSet(mask_ & ~(1u << (j - 1))); }
    IndexSet complement(int n) const { return IndexSet(full(n).mask_ & ~mask_); }
    std::string str() const;   // "12", "{}" for empty

    friend bool operator==(IndexSet a, IndexSet b) { return a.mask_ == b.mask_; }
    friend bool operator!=(IndexSet a, IndexSet b) { return a.mask_ != b.mask_; }
    friend bool operator<(IndexSet a, IndexSet b) { return a.mask_ < b.mask_; }

private:
    std::uint32_t mask_ = 0;
};

// Chain full = I_n > I_{n-1} > ... > I_0 = {} ; sets()[k] has k elements.
class NestingPath {
public:
    explicit NestingPath(std::vector<IndexSet> descending);   // from full set down to {}
    static NestingPath from_order(const std::vector<int>& added);   // j_1, j_2, ... added bottom-up
    static NestingPath parse(const std::string& text, int n);       // "12>1>" style
    const IndexSet& level(int k) const { return sets_.at(static_cast<std::size_t>(k)); }
    int length() const { return static_cast<int>(sets_.size()) - 1; }
    int added(int k) const;   // the index in I_k \ I_{k-1}
    std::string str() const;

private:
    std::vector<IndexSet> sets_;   // sets_[k] = I_k
};

// Dense square operator on (C^dim)^{(x) N}; basis tuples in lexicographic order,
// site 1 most significant. Entries are polynomials in u.
class TensorOperator {
public:
    TensorOperator() = default;
    TensorOperator(int dim, int sites);
    static TensorOperator identity(int dim, int sites, const PolyU& scale = PolyU(1));

    int local_dim() const { return d_; }
    int sites() const { return n_; }
    int size() const { return size_; }
    const PolyU& at(int r, int c) const { return e_[static_cast<std::size_t>(r * size_ + c)]; }
    PolyU& at(int r, int c) { return e_[static_cast<std::size_t>(r * size_ + c)]; }

    std::vector<int> tuple(int index) const;            // 0-based components
    int index(const std::vector<int>& tuple) const;

    bool is_zero() const;
    int max_degree() const;
    TensorOperator shift(const Rat& a) const;            // every entry p(u) -> p(u + a)
    TensorOperator coeff_matrix(int k) const;            // coefficient of u^k as constant operator
    Rat eval_entry(int r, int c, const Rat& u) const { return at(r, c).eval(u); }
    std::string max_residual() const;                    // largest-degree nonzero entry, "0" if none
    bool respects_sectors() const;

    TensorOperator& operator+=(const TensorOperator& o);
    TensorOperator& operator-=(const TensorOperator& o);
    TensorOperator& operator*=(const PolyU& s);
    friend TensorOperator operator+(TensorOperator a, const TensorOperator& b) { return a += b; }
    friend TensorOperator operator-(TensorOperator a, const TensorOperator& b) { return a -= b; }
    friend TensorOperator operator*(TensorOperator a, const PolyU& s) { return a *= s; }
    friend TensorOperator operator*(const PolyU& s, TensorOperator a) { return a *= s; }
    friend bool operator==(const TensorOperator& a, const TensorOperator& b);

private:
    int d_ = 0, n_ = 0, size_ = 0;
    std::vector<PolyU> e_;
};

TensorOperator op_mul(const TensorOperator& a, const TensorOperator& b);
TensorOperator op_comm(const TensorOperator& a, const TensorOperator& b);
inline TensorOperator operator*(const TensorOperator& a, const TensorOperator& b) { return op_mul(a, b); }

// B * X = A for commuting operators, solved exactly sector by sector
TensorOperator op_left_divide(const TensorOperator& b, const TensorOperator& a);

// Graded permutation of tensor factors i < j (1-based sites). With grading,
// swapping odd vectors past each other picks up the Koszul sign.
TensorOperator perm_op(int dim, int sites, int i, int j, bool graded, std::uint32_t fermions = 0);

// basis indices grouped by multiset of spin directions, ordered by first member
std::vector<std::vector<int>> weight_sectors(int dim, int sites);

nlohmann::json to_json(const TensorOperator& op);

}  // namespace bf
