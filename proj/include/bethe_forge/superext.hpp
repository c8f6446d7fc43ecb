#pragma once

#include "bethe_forge/nesting.hpp"

namespace bf {

// bosonic idx: T_I^s Q_{I,j} = T_{I,j}^s Q_I - x_j T_{I,j}^{s-1}(u+2) Q_I(u-2)
// fermionic idx: T_{I,l}^s Q_I = T_I^s Q_{I,l} - y_l T_I^{s-1}(u+2) Q_{I,l}(u-2)
TensorOperator check_tq_super(IndexSet I, int idx, int s, const Twist& tw);

// QQ relation chosen by the gradings of a and b
TensorOperator check_qq_super(IndexSet I, int a, int b, const Twist& tw);

// true iff t_young(I, lambda) vanishes exactly when lambda_{n_b+1} > n_f,
// with n_b, n_f the bosonic and fermionic counts of I
bool check_fat_hook(const YoungDiagram& lambda, IndexSet I, const Twist& tw);
bool outside_fat_hook(const YoungDiagram& lambda, IndexSet I, const Twist& tw);

// boson-fermion QQ written with J = I u {l} in the boson-boson shape:
// (x_i - y_l) Q_J(u-2) Q_{J,i \ l} = x_i Q_{J \ l}(u-2) Q_{J,i} - y_l Q_{J \ l} Q_{J,i}(u-2)
TensorOperator check_bosonization(IndexSet I, int i, int l, const Twist& tw);

// graded generating series along a path
std::vector<TensorOperator> gen_series_super(const NestingPath& path, const Twist& tw, int sMax);

}  // namespace bf
