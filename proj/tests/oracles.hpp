#pragma once

#include "bethe_forge/coderiv.hpp"

namespace oracle {

// tr_0 ( R_{N0}(u - theta_N) ... R_{10}(u - theta_1) g_0 ), R = u + 2 P, built on
// the enlarged space with the auxiliary factor placed first. With a graded twist
// the permutations carry Koszul signs and the trace is a supertrace.
bf::TensorOperator rmatrix_transfer(const bf::Twist& tw, bool reverse_order = false);

// Level-one Q_{jbar} from the simple-pole permutation sum: (1 - x_j t) times the
// normalized closed form, evaluated at t = 1/x_j. Bosonic twists only.
bf::TensorOperator level_one_q(const bf::Twist& tw, int j);

// Q_empty for K = 2 from the QQ relation with I = {}, using level_one_q and
// Q_12 = phi: (x_1 - x_2) Q_empty(u - 2) phi(u) = x_1 Q_2(u - 2) Q_1(u) - x_2 Q_2(u) Q_1(u - 2)
bf::TensorOperator q_empty_from_qq(const bf::Twist& tw);

// deterministic small rational draws
bf::Twist random_twist(bf::SplitMix64& rng, int K, int M, int N);

}  // namespace oracle
