#pragma once

#include <string>
#include <vector>

#include "bethe_forge/coderiv.hpp"

namespace bf {

// 2 n_b - 2 n_f over the complement of I
Rat nesting_shift(IndexSet I, const Twist& tw);

// One factor (1 - xi_j t_j)(1 - g t_j)^{(x) N} of B, as diagonal entries that are
// polynomials in eps_j = t_j - 1/xi_j.
struct NormalizerFactor {
    int j = 0;
    std::vector<PolyU> diagonal;   // indexed by basis position
};
std::vector<NormalizerFactor> normalizer(IndexSet I, const Twist& tw);

enum class LimitOrder { Ascending, Descending };

// Q_I(u): residue limits over the complement of I
TensorOperator q_operator(IndexSet I, const Twist& tw, LimitOrder order = LimitOrder::Ascending);

// T_I^s for s = 0..sMax; the scalar 1/w_{Ibar}(z) is applied outside the limit
std::vector<TensorOperator> t_series(IndexSet I, const Twist& tw, int sMax);
TensorOperator t_sym(IndexSet I, int s, const Twist& tw);

// nested T for any diagram via the BR determinant divided by prod Q_I(u - 2k)
TensorOperator t_young(IndexSet I, const YoungDiagram& lambda, const Twist& tw);
// rectangle (s^a); a = 0 or s = 0 gives Q_I, negative arguments give zero
TensorOperator t_rect(IndexSet I, int a, int s, const Twist& tw);

// Q_{I u J} from the single-index operators Q_{I,j}, j in J
TensorOperator wronskian_q(IndexSet I, IndexSet J, const Twist& tw);

TensorOperator check_tq(IndexSet I, int j, int s, const Twist& tw);
TensorOperator check_qq(IndexSet I, int i, int j, const Twist& tw);
TensorOperator check_hirota(IndexSet I, int a, int s, const Twist& tw);
std::pair<TensorOperator, TensorOperator> check_bt(IndexSet I, int j, int a, int s, const Twist& tw);

// T^s of the full set for s = 0..sMax, rebuilt level by level along the path
// from the Q-operators only. Works for graded paths as well.
std::vector<TensorOperator> gen_series_t(const NestingPath& path, const Twist& tw, int sMax);

// Graphviz text of the inclusion lattice of index subsets
std::string hasse_export(int K, int M, const NestingPath* highlight = nullptr);

}  // namespace bf
