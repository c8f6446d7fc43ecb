#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bethe_forge/characters.hpp"
#include "bethe_forge/exactmath.hpp"
#include "bethe_forge/hilbert.hpp"

namespace bf {

using RatMatrix = std::vector<std::vector<Rat>>;
using JetMatrix = std::vector<std::vector<NilJet>>;
using LJet = LaurentJet<NilJet>;
using LJetMatrix = std::vector<std::vector<LJet>>;

RatMatrix diagonal_twist_matrix(const Twist& tw);
// exact inverse, nullopt when singular
std::optional<RatMatrix> rat_inverse(RatMatrix a);

// ---------------------------------------------------------------- jet layer

// Perturbed group element G = (1 + Phi_N) ... (1 + Phi_1) g restricted to the
// variables that can feed row `row` (0-based tuple) of an operator: at level n
// only phi_n[a, row_n] survives.
JetMatrix perturbed_group(const JetShape& shape, const RatMatrix& g, const std::vector<int>& row);

// sdet(1 - t G)^(-exponent) with t = t0 + t1 * eps, expanded on the window [lo, hi].
// exponent +1 is w(t), -1 its inverse. With t1 = 0 and window [0,0] this is a point value.
LJet jet_w(const JetMatrix& G, const Twist& tw, const Rat& t0, const Rat& t1, int exponent, int lo, int hi);

// Determinant of a matrix with even (mutually commuting) entries.
LJet jet_det(const LJetMatrix& m, const LJet& zero, const LJet& one);
// Inverse of a jet whose lowest body-carrying order may be positive; throws PoleHit if none.
LJet laurent_inverse(const LJet& f);

// Row `row` of (1 - xi_j t)(1 - g t)^{(x) N} as a polynomial in eps = t - 1/xi_j.
PolyU normalizer_row(const Twist& tw, int j, const std::vector<int>& row);

// Residue-limit factor for index j at row `row`: lim_{t -> 1/xi_j} of
// (1 - xi_j t) prod_i (1 - xi_{row_i} t) w(t)^{(-1)^{p_j}}.
NilJet pole_factor(const JetMatrix& G, const Twist& tw, int j, const std::vector<int>& row);

// A function of the (row-restricted) perturbed group element, returning one jet
// per output operator (e.g. one per power of a series variable).
using JetFunction = std::function<std::vector<NilJet>(const JetMatrix& G, const std::vector<int>& row)>;

// Applies (x)_i (u - theta_i + uShift + 2 D) to the function, one operator per output.
std::vector<TensorOperator> coderivative_rows(const Twist& tw, const Rat& uShift, int outputs, const JetFunction& f,
                                              const RatMatrix* g = nullptr);

// Extraction of one row from a jet: adds 2^{|S|} sign * coeff * prod_{i not in S}(u_i + shift)
// into row `row` of `out`.
void extract_row(const NilJet& jet, const std::vector<int>& row, const std::vector<PolyU>& site_factor_products,
                 const Twist& tw, TensorOperator& out);

// ---------------------------------------------------------------- W operators

struct WFactor {
    Rat t;
    int exponent = 1;   // +1: w(t), -1: 1/w(t)
};

struct WSpec {
    Twist tw;
    Rat uShift = 0;
    std::vector<WFactor> factors;   // Pi = prod w(t_k)^{exponent_k}
};

// (x)_i (u_i + uShift + 2 D) Pi(g)
TensorOperator coderivative_apply(const WSpec& spec);

// Permutation-sum closed form for (x)_i (2 + u_i + 2 D) w(t), bosonic twists only.
TensorOperator diagram_oracle(const Twist& tw, const Rat& t);
// Simple-pole normalized form: (1 - g t)^{(x) N} times the above.
TensorOperator diagram_oracle_normalized(const Twist& tw, const Rat& t);

// (x)_i (u_i + 2 D) chi_lambda(g) via Jacobi-Trudi over the jet ring.
TensorOperator transfer_matrix(const YoungDiagram& lambda, const Twist& tw, const Rat& uShift = 0);
// T^s for s = 0..sMax at once: (x)_i (u_i + uShift + 2 D) chi_s(g)
std::vector<TensorOperator> transfer_series(const Twist& tw, int sMax, const Rat& uShift = 0,
                                            const std::vector<WFactor>& extra = {});

// ---------------------------------------------------------------- checks

// Desk-scale guard: N <= 5 and K + M <= 4 unless overridden.
void check_size(const Twist& tw, bool override_guard = false);

// master identity LHS - RHS for Pi = prod w(t_k) given by `extra`
TensorOperator check_master(const Twist& tw, const Rat& z, const Rat& t, const std::vector<WFactor>& extra);

// W_I(u) = (x)_i (u_i + 2 D) prod_{j in I} w(z_j) (I indexes zList, 1-based)
TensorOperator w_operator(const Twist& tw, const std::vector<Rat>& zList, IndexSet I, const Rat& uShift = 0);
TensorOperator check_plucker(const Twist& tw, const std::vector<Rat>& zList, IndexSet I, int i, int j);
TensorOperator check_master_det(const Twist& tw, const std::vector<Rat>& zList, int n);

TensorOperator check_br(const YoungDiagram& lambda, const Twist& tw);

// [[(x)(u_i + D) Pi, (x)(u_i + v + D) Pi']]
TensorOperator check_commutativity(const std::vector<WFactor>& pi, const std::vector<WFactor>& pi2, const Rat& v,
                                   const Twist& tw);

// C_{m,n} of the eigenvalue-removal argument for a twist conjugated by omega
// (g = omega^{-1} diag(xi) omega). Bosonic twists only.
TensorOperator check_removal(int m, int n, int j, const Twist& tw, const RatMatrix& omega);

// phi(u) = prod_i (u - theta_i)
PolyU phi_poly(const Twist& tw);

}  // namespace bf
