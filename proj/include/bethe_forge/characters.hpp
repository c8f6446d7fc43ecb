#pragma once

#include <string>
#include <vector>

#include "bethe_forge/exactmath.hpp"
#include "bethe_forge/hilbert.hpp"

namespace bf {

class YoungDiagram {
public:
    YoungDiagram() = default;
    YoungDiagram(std::initializer_list<int> rows) : YoungDiagram(std::vector<int>(rows)) {}
    explicit YoungDiagram(std::vector<int> rows);   // trailing zeros dropped; throws ConfigError if not decreasing
    static YoungDiagram rectangle(int a, int s);     // s^a
    static YoungDiagram parse(const std::string& text);   // "2,1"

    const std::vector<int>& rows() const { return rows_; }
    int height() const { return static_cast<int>(rows_.size()); }
    int row(int i) const { return i < height() ? rows_[static_cast<std::size_t>(i)] : 0; }   // 0-based
    bool empty() const { return rows_.empty(); }
    std::string str() const;

    friend bool operator==(const YoungDiagram& a, const YoungDiagram& b) { return a.rows_ == b.rows_; }

private:
    std::vector<int> rows_;
};

// prod over fermionic j in I of (1 - z y_j) / prod over bosonic j in I of (1 - z x_j)
Rat gen_w(const Rat& z, const Twist& tw, IndexSet I);

// coefficients of gen_w as a power series in z, orders 0..order
std::vector<Rat> gen_w_series(const Twist& tw, IndexSet I, int order);

Rat chi_sym(int s, const Twist& tw, IndexSet I);
Rat chi_young(const YoungDiagram& lambda, const Twist& tw, IndexSet I);

// chi^{(a,s+1)} chi^{(a,s-1)} - chi^{(a,s)}^2 + chi^{(a-1,s)} chi^{(a+1,s)}
Rat check_char_hirota(int a, int s, const Twist& tw);

// Jacobi-Trudi matrix entries: entry (i,j) holds index lambda_j + i - j (0-based i,j)
int jacobi_trudi_index(const YoungDiagram& lambda, int i, int j);

// Determinant over a commutative ring by Laplace expansion along the first row.
template <class T, class Mul>
T laplace_det(const std::vector<std::vector<T>>& m, const T& zero, const T& one, Mul mul) {
    const std::size_t n = m.size();
    if (n == 0) return one;
    if (n == 1) return m[0][0];
    T acc = zero;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<T>> minor;
        minor.reserve(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<T> row;
            row.reserve(n - 1);
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(m[r][k]);
            minor.push_back(std::move(row));
        }
        T term = mul(m[0][c], laplace_det(minor, zero, one, mul));
        if (c % 2) acc = acc - term;
        else acc = acc + term;
    }
    return acc;
}

}  // namespace bf
