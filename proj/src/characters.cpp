#include "bethe_forge/characters.hpp"

#include <sstream>

namespace bf {

YoungDiagram::YoungDiagram(std::vector<int> rows) : rows_(std::move(rows)) {
    while (!rows_.empty() && rows_.back() == 0) rows_.pop_back();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i] < 0) throw ConfigError("Young diagram rows must be nonnegative");
        if (i > 0 && rows_[i] > rows_[i - 1]) throw ConfigError("Young diagram rows must be weakly decreasing");
    }
}

YoungDiagram YoungDiagram::rectangle(int a, int s) {
    return YoungDiagram(std::vector<int>(static_cast<std::size_t>(std::max(a, 0)), s));
}

YoungDiagram YoungDiagram::parse(const std::string& text) {
    std::vector<int> rows;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) rows.push_back(std::stoi(item));
    return YoungDiagram(rows);
}

std::string YoungDiagram::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < rows_.size(); ++i) s += (i ? "," : "") + std::to_string(rows_[i]);
    return s + ")";
}

Rat gen_w(const Rat& z, const Twist& tw, IndexSet I) {
    Rat num = 1, den = 1;
    for (int j : I.elements()) {
        Rat f = 1 - z * tw.eigenvalue(j);
        if (tw.fermionic(j)) {
            num *= f;
        } else {
            if (is_zero(f)) throw PoleHit("gen_w: z hits the pole 1/x_" + std::to_string(j));
            den *= f;
        }
    }
    return num / den;
}

std::vector<Rat> gen_w_series(const Twist& tw, IndexSet I, int order) {
    std::vector<Rat> c(static_cast<std::size_t>(order + 1), Rat(0));
    c[0] = 1;
    for (int j : I.elements()) {
        const Rat& x = tw.eigenvalue(j);
        if (tw.fermionic(j)) {
            for (int k = order; k >= 1; --k) c[static_cast<std::size_t>(k)] -= x * c[static_cast<std::size_t>(k - 1)];
        } else {
            // divide by (1 - x z): c_k += x c_{k-1} running upward
            for (int k = 1; k <= order; ++k) c[static_cast<std::size_t>(k)] += x * c[static_cast<std::size_t>(k - 1)];
        }
    }
    return c;
}

Rat chi_sym(int s, const Twist& tw, IndexSet I) {
    if (s < 0) return 0;
    return gen_w_series(tw, I, s)[static_cast<std::size_t>(s)];
}

int jacobi_trudi_index(const YoungDiagram& lambda, int i, int j) { return lambda.row(j) + i - j; }

Rat chi_young(const YoungDiagram& lambda, const Twist& tw, IndexSet I) {
    const int a = lambda.height();
    if (a == 0) return 1;
    const int top = lambda.row(0) + a;
    auto series = gen_w_series(tw, I, top);
    auto chi = [&](int s) { return s < 0 ? Rat(0) : series[static_cast<std::size_t>(s)]; };
    std::vector<std::vector<Rat>> m(static_cast<std::size_t>(a), std::vector<Rat>(static_cast<std::size_t>(a)));
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = chi(jacobi_trudi_index(lambda, i, j));
    return laplace_det<Rat>(m, Rat(0), Rat(1), [](const Rat& x, const Rat& y) { return Rat(x * y); });
}

Rat check_char_hirota(int a, int s, const Twist& tw) {
    const IndexSet all = IndexSet::full(tw.dim());
    auto chi = [&](int aa, int ss) { return chi_young(YoungDiagram::rectangle(aa, ss), tw, all); };
    return chi(a, s + 1) * chi(a, s - 1) - chi(a, s) * chi(a, s) + chi(a - 1, s) * chi(a + 1, s);
}

}  // namespace bf
